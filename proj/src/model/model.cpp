#include "sketchvos/model/model.hpp"

namespace sketchvos::model {

using namespace numerics;

void ModelConfig::validate() const {
  encoder.validate();
  fusion.validate();
  if (every_k < 1) throw ConfigError("every_k must be >= 1");
  check_reference_compatible(reference_kind, fusion.design);
}

void check_reference_compatible(refgen::ReferenceKind kind, Design design) {
  if (kind == refgen::ReferenceKind::mask && design != Design::concat) {
    throw ConfigError("reference kind 'mask' requires the concat design, got " + std::string(to_string(design)));
  }
}

template <typename T>
Model<T>::Model(const ModelConfig& cfg, std::uint64_t seed) : config(cfg) {
  config.validate();
  std::mt19937_64 rng(seed);
  const EncoderConfig& e = config.encoder;
  const FusionConfig& f = config.fusion;
  frame_enc = FrameEncoder<T>(e, rng);
  value_enc = ValueEncoder<T>(e, rng);
  if (f.uses_sketch_encoder()) sketch_enc = SketchEncoder<T>(e, rng);
  if (f.uses_attention()) {
    const int sketch_ch = f.sketch_level == SketchLevel::l4 ? e.l4_channels() : e.l5_channels();
    std::vector<int> frame_levels;
    if (f.visual_levels != VisualLevels::l5) frame_levels.push_back(e.l4_channels());
    if (f.visual_levels != VisualLevels::l4) frame_levels.push_back(e.l5_channels());
    for (int frame_ch : frame_levels) {
      const bool kv = f.design == Design::cross_kv;
      cross.emplace_back(kv ? frame_ch : sketch_ch, kv ? sketch_ch : frame_ch, f.channels, f.tied_projections, rng);
    }
    adapter = Conv<T>(f.channels, e.value_dim, 3, 1, rng);
  } else if (f.design == Design::convweight) {
    adapter = Conv<T>(e.l5_channels(), e.value_dim, 3, 1, rng);
    hyper = HyperNet<T>(e.l5_channels(), e.value_dim, rng);
  }
  decoder = Decoder<T>(e, rng);
  if (f.design != Design::convweight) head = SegHead<T>(e.value_dim, rng);
}

template <typename T>
ParameterList<T> Model<T>::parameters() {
  ParameterList<T> out;
  const FusionConfig& f = config.fusion;
  frame_enc.collect(out, "frame_enc");
  value_enc.collect(out, "value_enc");
  if (f.uses_sketch_encoder()) sketch_enc.collect(out, "sketch_enc");
  for (std::size_t i = 0; i < cross.size(); ++i) cross[i].collect(out, "fusion.level" + std::to_string(i));
  if (f.design != Design::concat) adapter.collect(out, "fusion.adapter");
  if (f.design == Design::convweight) hyper.collect(out, "hyper");
  decoder.collect(out, "decoder");
  if (f.design != Design::convweight) head.collect(out, "head");
  return out;
}

template <typename T>
std::size_t Model<T>::parameter_count() {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.param->value().size();
  return n;
}

template <typename T>
const Var<T>& Model<T>::sketch_level(const SketchFeatures<T>& s) const {
  switch (config.fusion.sketch_level) {
    case SketchLevel::l4: return s.l4;
    case SketchLevel::l5: return s.l5;
    case SketchLevel::gap: return s.gap;
  }
  return s.l5;
}

template <typename T>
Var<T> Model<T>::fuse(const VisualFeatures<T>& frame, const SketchFeatures<T>& sketch) const {
  const FusionConfig& f = config.fusion;
  if (f.design == Design::convweight) return adapter(frame.l5);
  if (!f.uses_attention()) throw ConfigError("fuse: the concat design fuses at the memory value");
  const Var<T>& s = sketch_level(sketch);
  Var<T> o;
  if (f.visual_levels == VisualLevels::multi) {
    o = fuse_multi_level(f.design, frame, s, cross[0], cross[1]);
  } else {
    o = fuse_level(f.design, f.visual_levels == VisualLevels::l4 ? frame.l4 : frame.l5, s, cross[0]);
  }
  return adapter(o);
}

template <typename T>
HeadWeights<T> Model<T>::head_weights(const SketchFeatures<T>* sketch) const {
  if (config.fusion.design != Design::convweight) return head.weights();
  if (!sketch) throw ConfigError("convweight head needs sketch features");
  return hyper(sketch->gap);
}

template <typename T>
PropagationTrace<T> Model<T>::run(const FrameSource& frames, int n_frames, const Var<T>& reference,
                                  const InsertRule& insert) const {
  if (n_frames < 1) throw ShapeError("run: need at least one frame");
  const Design design = config.fusion.design;
  const Var<T> img0 = frames(0);
  const int H = img0.dim(1), W = img0.dim(2);
  const Var<T> ref = reference.value().rank() == 2 ? reshape(reference, {1, H, W}) : reference;
  if (ref.dim(1) != H || ref.dim(2) != W) {
    throw ShapeError("run: reference " + shape_str(reference.shape()) + " does not match frame " +
                     shape_str(img0.shape()));
  }

  auto flat = [](const Var<T>& x) { return reshape(x, {x.dim(0), x.dim(1) * x.dim(2)}); };
  auto value_of = [&](const Var<T>& img, const Var<T>& aux) {
    return flat(encode_value(img, aux.value().rank() == 2 ? reshape(aux, {1, H, W}) : aux));
  };

  MemoryBank<T> bank;
  auto readout = [&](const VisualFeatures<T>& f) {
    const Var<T> r = read(affinity(flat(f.key), bank, config.affinity), bank);
    return reshape(r, {r.dim(0), f.key.dim(1), f.key.dim(2)});
  };

  PropagationTrace<T> trace;
  const VisualFeatures<T> f0 = encode_frame(img0);
  HeadWeights<T> head_w;
  Var<T> m0;
  if (design == Design::concat) {
    head_w = head_weights(nullptr);
    bank.insert_entry(flat(f0.key), value_of(img0, ref), kReferenceEntry);
    m0 = sigmoid(decode(readout(f0), f0, head_w, H, W));
  } else {
    const SketchFeatures<T> sk = encode_sketch(ref);
    head_w = head_weights(&sk);
    m0 = sigmoid(decode(fuse(f0, sk), f0, head_w, H, W));
    trace.first_supervised = true;
  }
  bank.insert_entry(flat(f0.key), value_of(img0, m0), 0);
  trace.probs.push_back(m0);

  for (int t = 1; t < n_frames; ++t) {
    const Var<T> img = frames(t);
    const VisualFeatures<T> f = encode_frame(img);
    const Var<T> m = sigmoid(decode(readout(f), f, head_w, H, W));
    trace.probs.push_back(m);
    if (insert(t)) bank.insert_entry(flat(f.key), value_of(img, m), t);
  }
  trace.entries = bank.entries();
  return trace;
}

template struct Model<float>;
template struct Model<double>;

}  // namespace sketchvos::model
