#include "sketchvos/model/decoder.hpp"

namespace sketchvos::model {

using namespace numerics;

template <typename T>
SegHead<T>::SegHead(int decoder_channels, std::mt19937_64& rng)
    : c1(decoder_channels, kHeadHidden, 3, 1, rng), c2(kHeadHidden, 1, 1, 1, rng) {}

template <typename T>
void SegHead<T>::collect(ParameterList<T>& out, const std::string& name) {
  c1.collect(out, name + ".c1");
  c2.collect(out, name + ".c2");
}

template <typename T>
Var<T> apply_head(const Var<T>& x, const HeadWeights<T>& head) {
  return conv2d(relu(conv2d(x, head.w1, head.b1, 1, 1)), head.w2, head.b2, 1, 0);
}

template <typename T>
Decoder<T>::Decoder(const EncoderConfig& cfg, std::mt19937_64& rng)
    : skip4(cfg.l4_channels(), kSkipChannels, 1, 1, rng),
      skip3(cfg.l3_channels(), kSkipChannels, 1, 1, rng),
      block1(cfg.value_dim + kSkipChannels, cfg.value_dim, 3, 1, rng),
      block2(cfg.value_dim + kSkipChannels, cfg.value_dim, 3, 1, rng),
      channels(cfg.value_dim) {}

template <typename T>
Var<T> Decoder<T>::operator()(const Var<T>& input, const Var<T>& l4, const Var<T>& l3, const HeadWeights<T>& head,
                              int out_h, int out_w) const {
  if (l4.dim(1) * 2 != l3.dim(1) || l4.dim(2) * 2 != l3.dim(2)) {
    throw ShapeError("decode: skips " + shape_str(l4.shape()) + " and " + shape_str(l3.shape()) +
                     " are not one stride apart");
  }
  if (input.dim(0) != channels) {
    throw ShapeError("decode: input has " + std::to_string(input.dim(0)) + " channels, expected " +
                     std::to_string(channels));
  }
  Var<T> x = input;
  if (x.dim(1) * 2 == l4.dim(1) && x.dim(2) * 2 == l4.dim(2)) {
    x = bilinear_resize(x, l4.dim(1), l4.dim(2));
  } else if (x.dim(1) != l4.dim(1) || x.dim(2) != l4.dim(2)) {
    throw ShapeError("decode: input " + shape_str(input.shape()) + " matches neither stride 16 nor stride 8");
  }
  x = relu(block1(concat_channels(std::vector<Var<T>>{x, skip4(l4)})));
  x = bilinear_resize(x, l3.dim(1), l3.dim(2));
  x = relu(block2(concat_channels(std::vector<Var<T>>{x, skip3(l3)})));
  Var<T> logits = bilinear_resize(apply_head(x, head), out_h, out_w);
  return reshape(logits, {out_h, out_w});
}

template <typename T>
void Decoder<T>::collect(ParameterList<T>& out, const std::string& name) {
  skip4.collect(out, name + ".skip4");
  skip3.collect(out, name + ".skip3");
  block1.collect(out, name + ".block1");
  block2.collect(out, name + ".block2");
}

#define SKETCHVOS_INSTANTIATE_DECODER(T) \
  template struct SegHead<T>;            \
  template struct Decoder<T>;            \
  template Var<T> apply_head<T>(const Var<T>&, const HeadWeights<T>&);

SKETCHVOS_INSTANTIATE_DECODER(float)
SKETCHVOS_INSTANTIATE_DECODER(double)

}  // namespace sketchvos::model
