#include "sketchvos/cli/visualize.hpp"

#include <algorithm>

#include "sketchvos/dataio/dataset.hpp"
#include "sketchvos/dataio/png_io.hpp"

namespace sketchvos::cli {

namespace fs = std::filesystem;

RgbImage render_overlay(const RgbImage& frame, const LabelMap& prediction) {
  if (frame.height() != prediction.height() || frame.width() != prediction.width()) {
    throw ShapeError("overlay: prediction size differs from frame");
  }
  const auto& palette = dataio::davis_palette();
  RgbImage out = frame;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const int l = prediction.at(y, x);
      if (!l) continue;
      const bool edge = prediction.get_or(y - 1, x, 0) != l || prediction.get_or(y + 1, x, 0) != l ||
                        prediction.get_or(y, x - 1, 0) != l || prediction.get_or(y, x + 1, 0) != l;
      std::uint8_t* p = out.px(y, x);
      for (int c = 0; c < 3; ++c) {
        const int colour = palette[l][c];
        p[c] = static_cast<std::uint8_t>(edge ? colour : (6 * p[c] + 4 * colour + 5) / 10);
      }
    }
  }
  return out;
}

void draw_inset(RgbImage& frame, const std::vector<int>& object_ids, const std::vector<Mask>& references) {
  const auto& palette = dataio::davis_palette();
  const int h = frame.height() / 4, w = frame.width() / 4;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t* p = frame.px(y, x);
      std::fill(p, p + 3, std::uint8_t{32});
      for (std::size_t k = 0; k < references.size(); ++k) {
        bool on = false;
        for (int dy = 0; dy < 4 && !on; ++dy)
          for (int dx = 0; dx < 4 && !on; ++dx) on = references[k].get_or(4 * y + dy, 4 * x + dx, 0) != 0;
        if (on) std::copy(palette[object_ids[k]].begin(), palette[object_ids[k]].end(), p);
      }
    }
  }
}

int visualize(const fs::path& predictions, const fs::path& data, const fs::path& out, refgen::ReferenceKind kind) {
  if (!fs::is_directory(predictions)) throw NotFoundError("predictions " + predictions.string() + " do not exist");
  const dataio::DatasetIndex index = dataio::load_dataset(data);
  std::vector<fs::path> seqs;
  for (const auto& e : fs::directory_iterator(predictions)) {
    if (e.is_directory()) seqs.push_back(e.path());
  }
  std::sort(seqs.begin(), seqs.end());
  int written = 0;
  for (const auto& dir : seqs) {
    const auto& entry = index.find(dir.filename().string());
    const dataio::LoadedSequence seq = dataio::load_sequence(entry);
    std::vector<Mask> refs;
    for (int id : entry.object_ids) refs.push_back(dataio::resolve_reference(entry, seq, id, kind).raster);
    std::vector<fs::path> frames;
    for (const auto& f : fs::directory_iterator(dir)) {
      if (f.path().extension() == ".png") frames.push_back(f.path());
    }
    std::sort(frames.begin(), frames.end());
    fs::create_directories(out / entry.name);
    for (const auto& f : frames) {
      const int t = std::stoi(f.stem().string());
      if (t < 0 || t >= entry.n_frames) throw IntegrityError(f.string() + ": frame index outside the sequence");
      RgbImage img = render_overlay(seq.video.frames[t], dataio::read_label_png(f));
      if (t == 0) draw_inset(img, entry.object_ids, refs);
      dataio::write_rgb_png(out / entry.name / f.filename(), img);
      ++written;
    }
  }
  return written;
}

}  // namespace sketchvos::cli
