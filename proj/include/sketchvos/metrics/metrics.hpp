#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sketchvos/dataio/dataset.hpp"
#include "sketchvos/image.hpp"

namespace sketchvos::metrics {

inline constexpr double kDefaultBoundaryTolerance = 0.008;

/// Intersection over union; two empty masks score 1.
double region_j(const Mask& pred, const Mask& gt);

/// Foreground pixels with at least one background 4-neighbour (outside the
/// canvas counts as background).
Mask boundary_map(const Mask& m);

/// ceil(tol_fraction * image diagonal).
int tolerance_radius(int height, int width, double tol_fraction = kDefaultBoundaryTolerance);

/// Boundary F-measure with Euclidean disk matching of radius
/// tolerance_radius. Both boundaries empty scores 1; exactly one empty scores 0.
double boundary_f(const Mask& pred, const Mask& gt, double tol_fraction = kDefaultBoundaryTolerance);

struct ObjectScore {
  std::string sequence;
  int object_id = 0;
  double j_mean = 0;
  double f_mean = 0;
  int n_frames = 0;
};

struct EvalReport {
  std::vector<ObjectScore> objects;
  double j_mean = 0;
  double f_mean = 0;
  double jf_mean = 0;
};

/// Means of J and F over frames 1..T-1 (frame 0 only when T == 1).
ObjectScore score_object(const std::string& sequence, int object_id, const std::vector<Mask>& pred,
                         const std::vector<Mask>& gt);

/// Global means over (sequence, object) pairs.
EvalReport aggregate(std::vector<ObjectScore> scores);

/// Scores <pred_root>/<seq>/NNNNN.png label maps against the dataset's
/// annotations. A missing prediction frame raises IntegrityError naming it.
EvalReport evaluate_dataset(const std::filesystem::path& pred_root, const std::filesystem::path& gt_root,
                            std::optional<dataio::Split> split);

/// Writes global.csv and per_sequence.csv into `dir`.
void write_report_csv(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace sketchvos::metrics
