#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sketchvos/image.hpp"
#include "sketchvos/refgen/refgen.hpp"

namespace sketchvos::dataio {

namespace fs = std::filesystem;

enum class Split { train, val };

std::string_view to_string(Split split);
Split parse_split(std::string_view name);

/// Five-digit zero-padded frame file name, e.g. 00007.png.
std::string frame_file_name(int index);

/// One indexed sequence. Pixels are loaded on demand via load_sequence.
struct SequenceEntry {
  std::string name;
  int n_frames = 0;
  int height = 0;
  int width = 0;
  std::vector<int> object_ids;
  std::map<int, std::vector<int>> absent_frames;
  fs::path root;

  fs::path frame_path(int t) const;
  fs::path annotation_path(int t) const;
  fs::path reference_dir() const;
  fs::path reference_path(int object_id, refgen::ReferenceKind kind) const;
  fs::path strokes_path(int object_id) const;
};

struct DatasetIndex {
  fs::path root;
  std::optional<Split> split;  // empty: every sequence
  std::vector<SequenceEntry> sequences;

  const SequenceEntry& find(const std::string& name) const;
};

struct VideoSequence {
  std::string name;
  std::vector<RgbImage> frames;
  double fps = 24.0;
  std::vector<int> object_ids;

  int length() const { return static_cast<int>(frames.size()); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }
  int width() const { return frames.empty() ? 0 : frames.front().width(); }
};

struct ObjectAnnotation {
  int object_id = 0;
  std::vector<Mask> masks;
  std::vector<bool> absent;
};

struct LoadedSequence {
  VideoSequence video;
  std::vector<LabelMap> labels;
  std::vector<ObjectAnnotation> objects;

  /// Throws NotFoundError for an id the sequence does not annotate.
  const ObjectAnnotation& object(int object_id) const;
};

/// Indexes and validates a dataset root. Every integrity problem found is
/// collected and reported in one IntegrityError. Sequences outside `split`
/// are skipped when meta.json lists splits; without a split list every
/// sequence belongs to every split. No split selects every sequence.
DatasetIndex load_dataset(const fs::path& root, std::optional<Split> split = std::nullopt);

LoadedSequence load_sequence(const SequenceEntry& entry);

/// Strokes plus stored raster of an object's sketch, if the dataset has one.
std::optional<refgen::SketchRaster> load_sketch(const SequenceEntry& entry, int object_id);
void write_sketch(const SequenceEntry& entry, int object_id, const refgen::SketchRaster& sketch);

/// Reference for (sequence, object): the stored raster when present, else
/// derived from the first-frame mask (and the sketch, for contours).
refgen::Reference resolve_reference(const SequenceEntry& entry, const LoadedSequence& seq, int object_id,
                                    refgen::ReferenceKind kind);

/// Writes <obj>_<kind>.png for every object of every sequence in the root.
/// Returns the number of rasters written.
int gen_refs(const fs::path& root, const std::vector<refgen::ReferenceKind>& kinds);

}  // namespace sketchvos::dataio
