#include "sketchvos/dataio/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "sketchvos/dataio/png_io.hpp"

namespace sketchvos::dataio {
namespace {

using json = nlohmann::json;

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IntegrityError(path.string() + ": " + e.what());
  }
}

int count_pngs(const fs::path& dir) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") ++n;
  }
  return n;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string_view to_string(Split split) { return split == Split::train ? "train" : "val"; }

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  throw ConfigError("unknown split '" + std::string(name) + "' (expected train or val)");
}

std::string frame_file_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05d.png", index);
  return buf;
}

fs::path SequenceEntry::frame_path(int t) const { return root / "JPEGImages" / name / frame_file_name(t); }
fs::path SequenceEntry::annotation_path(int t) const { return root / "Annotations" / name / frame_file_name(t); }
fs::path SequenceEntry::reference_dir() const { return root / "References" / name; }
fs::path SequenceEntry::reference_path(int object_id, refgen::ReferenceKind kind) const {
  return reference_dir() / (std::to_string(object_id) + "_" + std::string(refgen::to_string(kind)) + ".png");
}
fs::path SequenceEntry::strokes_path(int object_id) const {
  return reference_dir() / (std::to_string(object_id) + "_sketch.strokes.json");
}

const SequenceEntry& DatasetIndex::find(const std::string& name) const {
  for (const auto& s : sequences) {
    if (s.name == name) return s;
  }
  throw NotFoundError("sequence '" + name + "' not in dataset " + root.string());
}

const ObjectAnnotation& LoadedSequence::object(int object_id) const {
  for (const auto& o : objects) {
    if (o.object_id == object_id) return o;
  }
  throw NotFoundError("object " + std::to_string(object_id) + " not annotated in " + video.name);
}

DatasetIndex load_dataset(const fs::path& root, std::optional<Split> split) {
  if (!fs::is_directory(root)) throw NotFoundError("dataset root " + root.string() + " does not exist");
  std::vector<std::string> problems;
  for (const char* dir : {"JPEGImages", "Annotations"}) {
    if (!fs::is_directory(root / dir)) problems.push_back("missing directory " + (root / dir).string());
  }
  if (!fs::is_regular_file(root / "meta.json")) problems.push_back("missing " + (root / "meta.json").string());
  if (!problems.empty()) throw IntegrityError(join(problems, "; "));

  const json meta = read_json(root / "meta.json");
  if (!meta.contains("sequences") || !meta["sequences"].is_object()) {
    throw IntegrityError((root / "meta.json").string() + ": missing 'sequences' object");
  }
  std::optional<std::set<std::string>> wanted;
  if (split && meta.contains("splits")) {
    const auto key = std::string(to_string(*split));
    wanted.emplace();
    for (const auto& n : meta["splits"].value(key, json::array())) wanted->insert(n.get<std::string>());
  }

  DatasetIndex index{root, split, {}};
  for (const auto& [name, info] : meta["sequences"].items()) {
    if (wanted && !wanted->count(name)) continue;
    SequenceEntry e;
    e.name = name;
    e.root = root;
    e.n_frames = info.value("n_frames", 0);
    const json objects = info.value("objects", json::object());
    for (const auto& [id, obj] : objects.items()) {
      const int oid = std::stoi(id);
      e.object_ids.push_back(oid);
      e.absent_frames[oid] = obj.value("absent_frames", std::vector<int>{});
    }
    std::sort(e.object_ids.begin(), e.object_ids.end());

    const fs::path frames = root / "JPEGImages" / name, annos = root / "Annotations" / name;
    if (!fs::is_directory(frames) || !fs::is_directory(annos)) {
      problems.push_back(name + ": missing frame or annotation directory");
      continue;
    }
    const int nf = count_pngs(frames), na = count_pngs(annos);
    if (e.n_frames < 1 || nf != e.n_frames || na != e.n_frames) {
      problems.push_back(name + ": " + std::to_string(nf) + " frames, " + std::to_string(na) + " masks, meta says " +
                         std::to_string(e.n_frames));
      continue;
    }
    const std::set<int> known(e.object_ids.begin(), e.object_ids.end());
    std::set<int> unknown, missing_first;
    for (int t = 0; t < e.n_frames; ++t) {
      if (!fs::is_regular_file(e.frame_path(t)) || !fs::is_regular_file(e.annotation_path(t))) {
        problems.push_back(name + ": missing " + frame_file_name(t));
        break;
      }
      const LabelMap labels = read_label_png(e.annotation_path(t));
      if (t == 0) {
        e.height = labels.height();
        e.width = labels.width();
      } else if (labels.height() != e.height || labels.width() != e.width) {
        problems.push_back(name + ": mask " + frame_file_name(t) + " has a different size");
      }
      std::set<int> present;
      for (auto v : labels.data()) {
        if (v && !known.count(v)) unknown.insert(v);
        if (v) present.insert(v);
      }
      if (t == 0) {
        for (int id : e.object_ids) {
          if (!present.count(id)) missing_first.insert(id);
        }
      }
    }
    for (int id : unknown) problems.push_back(name + ": mask uses object id " + std::to_string(id) + " absent from metadata");
    for (int id : missing_first) problems.push_back(name + ": object " + std::to_string(id) + " has an empty first-frame mask");
    index.sequences.push_back(std::move(e));
  }
  if (!problems.empty()) throw IntegrityError("dataset " + root.string() + ": " + join(problems, "; "));
  return index;
}

LoadedSequence load_sequence(const SequenceEntry& entry) {
  LoadedSequence seq;
  seq.video.name = entry.name;
  seq.video.object_ids = entry.object_ids;
  for (int id : entry.object_ids) seq.objects.push_back({id, {}, {}});
  for (int t = 0; t < entry.n_frames; ++t) {
    seq.video.frames.push_back(read_rgb_png(entry.frame_path(t)));
    LabelMap labels = read_label_png(entry.annotation_path(t));
    if (labels.height() != seq.video.frames.back().height() || labels.width() != seq.video.frames.back().width()) {
      throw IntegrityError(entry.name + ": frame and mask " + frame_file_name(t) + " differ in size");
    }
    for (auto& obj : seq.objects) {
      obj.masks.push_back(mask_for_label(labels, obj.object_id));
      obj.absent.push_back(count_foreground(obj.masks.back()) == 0);
    }
    seq.labels.push_back(std::move(labels));
  }
  return seq;
}

std::optional<refgen::SketchRaster> load_sketch(const SequenceEntry& entry, int object_id) {
  const fs::path strokes_file = entry.strokes_path(object_id);
  const fs::path raster_file = entry.reference_path(object_id, refgen::ReferenceKind::sketch);
  if (!fs::is_regular_file(strokes_file) || !fs::is_regular_file(raster_file)) return std::nullopt;
  const json j = read_json(strokes_file);
  refgen::SketchRaster s;
  s.canvas = read_mask_png(raster_file);
  s.stroke_width = refgen::stroke_width_for(s.canvas.height(), s.canvas.width());
  s.closed = true;
  for (const auto& line : j) {
    refgen::Polyline poly;
    for (const auto& p : line) poly.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    s.strokes.push_back(std::move(poly));
  }
  return s;
}

void write_sketch(const SequenceEntry& entry, int object_id, const refgen::SketchRaster& sketch) {
  fs::create_directories(entry.reference_dir());
  json lines = json::array();
  for (const auto& line : sketch.strokes) {
    json pts = json::array();
    for (const auto& p : line) pts.push_back({p.x, p.y});
    lines.push_back(std::move(pts));
  }
  std::ofstream(entry.strokes_path(object_id)) << lines.dump() << '\n';
  write_mask_png(entry.reference_path(object_id, refgen::ReferenceKind::sketch), sketch.canvas);
}

refgen::Reference resolve_reference(const SequenceEntry& entry, const LoadedSequence& seq, int object_id,
                                    refgen::ReferenceKind kind) {
  using refgen::ReferenceKind;
  const Mask& first = seq.object(object_id).masks.front();
  if (kind == ReferenceKind::mask) return refgen::make_reference(kind, first, std::nullopt, object_id);
  const fs::path stored = entry.reference_path(object_id, kind);
  if (fs::is_regular_file(stored)) {
    Mask raster = read_mask_png(stored);
    require_same_size(raster, first, "stored reference");
    return {kind, std::move(raster), object_id};
  }
  std::optional<refgen::SketchRaster> sketch;
  if (kind == ReferenceKind::sketch || kind == ReferenceKind::contour) sketch = load_sketch(entry, object_id);
  return refgen::make_reference(kind, first, sketch, object_id);
}

int gen_refs(const fs::path& root, const std::vector<refgen::ReferenceKind>& kinds) {
  const DatasetIndex index = load_dataset(root);
  if (std::count(kinds.begin(), kinds.end(), refgen::ReferenceKind::contour)) {
    for (const auto& e : index.sequences) {
      for (int id : e.object_ids) {
        if (!fs::is_regular_file(e.strokes_path(id))) {
          throw ConfigError("contour references require sketches (run gen-synth first); missing " +
                            e.strokes_path(id).string());
        }
      }
    }
  }
  int written = 0;
  for (const auto& e : index.sequences) {
    const LoadedSequence seq = load_sequence(e);
    fs::create_directories(e.reference_dir());
    for (int id : e.object_ids) {
      const Mask& first = seq.object(id).masks.front();
      std::optional<refgen::SketchRaster> sketch = load_sketch(e, id);
      for (refgen::ReferenceKind kind : kinds) {
        if (kind == refgen::ReferenceKind::sketch) continue;  // written by the generator
        const refgen::Reference ref = refgen::make_reference(kind, first, sketch, id);
        write_mask_png(e.reference_path(id, kind), ref.raster);
        ++written;
      }
    }
  }
  return written;
}

}  // namespace sketchvos::dataio
