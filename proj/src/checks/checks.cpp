#include "sketchvos/checks/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "sketchvos/metrics/metrics.hpp"
#include "sketchvos/model/model.hpp"
#include "sketchvos/numerics/grad_check.hpp"
#include "sketchvos/train/train.hpp"

namespace sketchvos::checks {

using namespace model;
using numerics::Tensor;

namespace {

using Outcome = std::pair<bool, std::string>;

CheckResult timed(const std::string& suite, const std::string& name, const std::function<Outcome()>& fn) {
  CheckResult r{suite, name, false, "", 0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::tie(r.passed, r.detail) = fn();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("threw: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

Tensor<double> random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Tensor<double> t(std::move(shape));
  std::uniform_real_distribution<double> dist(lo, hi);
  for (auto& v : t.values()) v = dist(rng);
  return t;
}

Var<double> random_var(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return Var<double>(random_tensor(std::move(shape), rng, lo, hi));
}

// ---- metric oracles ----

Mask random_mask(int h, int w, std::mt19937_64& rng) {
  Mask m(h, w);
  std::bernoulli_distribution on(std::uniform_real_distribution<double>(0.05, 0.95)(rng));
  for (auto& v : m.data()) v = on(rng);
  return m;
}

double j_brute(const Mask& a, const Mask& b) {
  long inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a.data()[i] && b.data()[i];
    uni += a.data()[i] || b.data()[i];
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
}

std::vector<std::pair<int, int>> edge_pixels(const Mask& m) {
  std::vector<std::pair<int, int>> out;
  auto fg = [&](int y, int x) { return m.in_bounds(y, x) && m.at(y, x); };
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (fg(y, x) && !(fg(y - 1, x) && fg(y + 1, x) && fg(y, x - 1) && fg(y, x + 1))) out.emplace_back(y, x);
  return out;
}

double f_all_pairs(const Mask& pred, const Mask& gt) {
  const auto a = edge_pixels(pred), b = edge_pixels(gt);
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const double r = std::ceil(0.008 * std::hypot(pred.height(), pred.width()));
  auto matched = [r](const auto& from, const auto& to) {
    std::size_t hit = 0;
    for (const auto& [y, x] : from) {
      bool any = false;
      for (const auto& [v, u] : to) any = any || (y - v) * (y - v) + (x - u) * (x - u) <= r * r;
      hit += any;
    }
    return static_cast<double>(hit) / static_cast<double>(from.size());
  };
  const double p = matched(a, b), rc = matched(b, a);
  return p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
}

std::vector<std::pair<Mask, Mask>> adversarial_pairs(int n) {
  Mask empty(n, n), full(n, n, 1), dot(n, n), dot2(n, n), checker(n, n), inverse(n, n), ring(n, n);
  dot.at(n / 2, n / 2) = 1;
  dot2.at(0, n - 1) = 1;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      checker.at(y, x) = (x + y) % 2;
      inverse.at(y, x) = 1 - (x + y) % 2;
      ring.at(y, x) = y == 0 || x == 0 || y == n - 1 || x == n - 1;
    }
  return {{empty, empty}, {empty, full}, {full, empty}, {full, full}, {dot, dot},
          {dot, dot2},    {dot, empty},  {checker, inverse}, {full, dot}, {ring, full}};
}

// ---- gradient helpers ----

EncoderConfig small_encoder() {
  EncoderConfig e;
  e.widths = {4, 4, 8, 8};
  e.key_dim = 4;
  e.value_dim = 8;
  return e;
}

Var<double> readout(const Var<double>& x, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return numerics::weighted_sum(x, random_tensor(x.shape(), rng));
}

Outcome grad_outcome(const std::function<Var<double>()>& f, const ParameterList<double>& params, std::uint64_t seed) {
  numerics::GradCheckOptions opt;
  opt.eps = 1e-5;
  opt.seed = seed;
  const auto report = numerics::grad_check(f, params, opt);
  std::size_t probed = 0;
  std::string worst;
  double worst_err = -1;
  for (const auto& p : report.params) {
    probed += p.probed;
    if (p.max_rel_error > worst_err) {
      worst_err = p.max_rel_error;
      worst = p.name;
    }
  }
  const double err = report.max_rel_error();
  return {err < 1e-4, "max rel error " + sci(err) + " over " + std::to_string(probed) + " entries of " +
                          std::to_string(params.size()) + " tensors (worst " + worst + ")"};
}

Mask square(int n, int y0, int x0, int s) {
  Mask m(n, n);
  for (int y = y0; y < std::min(n, y0 + s); ++y)
    for (int x = x0; x < std::min(n, x0 + s); ++x) m.at(y, x) = 1;
  return m;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"metrics", "grads", "attention", "memory"};
  return names;
}

std::string format(const CheckResult& r) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << (r.passed ? "PASS " : "FAIL ") << r.suite << "/" << r.name << ": " << r.detail << " ["
     << r.seconds << " s]";
  return os.str();
}

std::vector<CheckResult> run_suite(std::string_view name) {
  if (name == "metrics") return metrics_suite();
  if (name == "grads") return grads_suite();
  if (name == "attention") return attention_suite();
  if (name == "memory") return memory_suite();
  if (name == "all") {
    std::vector<CheckResult> out;
    for (const auto& s : suite_names()) {
      auto part = run_suite(s);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  std::string valid = "all";
  for (const auto& s : suite_names()) valid += ", " + s;
  throw ConfigError("unknown check suite '" + std::string(name) + "' (expected one of " + valid + ")");
}

std::vector<CheckResult> metrics_suite() {
  std::vector<CheckResult> out;
  out.push_back(timed("metrics", "oracle_equivalence", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240611);
    auto pairs = adversarial_pairs(16);
    for (int i = 0; i < 100; ++i) pairs.emplace_back(random_mask(16, 16, rng), random_mask(16, 16, rng));
    std::size_t j_mismatch = 0;
    double f_err = 0;
    for (const auto& [a, b] : pairs) {
      j_mismatch += metrics::region_j(a, b) != j_brute(a, b);
      f_err = std::max(f_err, std::abs(metrics::boundary_f(a, b) - f_all_pairs(a, b)));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = j_mismatch == 0 && f_err < 1e-9 && secs < 10;
    return Outcome{ok, std::to_string(pairs.size()) + " pairs, J mismatches " + std::to_string(j_mismatch) +
                           ", max |dF| " + sci(f_err) + ", " + sci(secs) + " s (< 10 s)"};
  }));
  return out;
}

std::vector<CheckResult> grads_suite() {
  std::vector<CheckResult> out;
  const EncoderConfig enc = small_encoder();
  auto add = [&](const std::string& name, const std::function<Outcome()>& fn) { out.push_back(timed("grads", name, fn)); };

  add("frame_encoder", [&] {
    std::mt19937_64 rng(1);
    FrameEncoder<double> fe(enc, rng);
    ParameterList<double> params;
    fe.collect(params, "frame_enc");
    const auto img = random_var({3, 16, 16}, rng, -2, 2);
    return grad_outcome([&] {
      const auto f = fe(img);
      return numerics::add(numerics::add(readout(f.l3, 1), readout(f.l4, 2)),
                           numerics::add(readout(f.l5, 3), readout(f.key, 4)));
    }, params, 1);
  });
  add("value_encoder", [&] {
    std::mt19937_64 rng(2);
    ValueEncoder<double> ve(enc, rng);
    ParameterList<double> params;
    ve.collect(params, "value_enc");
    const auto img = random_var({3, 16, 16}, rng, -2, 2), aux = random_var({1, 16, 16}, rng, 0, 1);
    return grad_outcome([&] { return readout(ve(img, aux), 5); }, params, 2);
  });
  add("sketch_encoder", [&] {
    std::mt19937_64 rng(3);
    SketchEncoder<double> se(enc, rng);
    ParameterList<double> params;
    se.collect(params, "sketch_enc");
    const auto raster = random_var({1, 16, 16}, rng, 0, 1);
    return grad_outcome([&] {
      const auto s = se(raster);
      return numerics::add(numerics::add(readout(s.l4, 6), readout(s.l5, 7)), readout(s.gap, 8));
    }, params, 3);
  });
  for (Design d : {Design::cross_kv, Design::cross_q}) {
    const std::string tag(to_string(d));
    add(tag + "_single_level", [&, d] {
      std::mt19937_64 rng(4);
      CrossProjections<double> proj(8, 8, 8, false, rng);
      ParameterList<double> params;
      proj.collect(params, tag);
      const auto f = random_var({8, 4, 4}, rng), s = random_var({8, 3, 3}, rng);
      return grad_outcome([&] { return readout(fuse_level(d, f, s, proj), 9); }, params, 4);
    });
    add(tag + "_multi_level", [&, d] {
      std::mt19937_64 rng(5);
      const bool kv = d == Design::cross_kv;
      CrossProjections<double> p4(kv ? 6 : 8, kv ? 8 : 6, 8, false, rng), p5(8, 8, 8, false, rng);
      ParameterList<double> params;
      p4.collect(params, tag + ".l4");
      p5.collect(params, tag + ".l5");
      VisualFeatures<double> vf{random_var({4, 8, 8}, rng), random_var({6, 4, 4}, rng), random_var({8, 2, 2}, rng),
                                random_var({4, 2, 2}, rng)};
      const auto s = random_var({8, 2, 2}, rng);
      return grad_outcome([&] { return readout(fuse_multi_level(d, vf, s, p4, p5), 10); }, params, 5);
    });
  }
  add("fuse_concat", [&] {
    std::mt19937_64 rng(9);
    ValueEncoder<double> ve(enc, rng);
    ParameterList<double> params;
    ve.collect(params, "fuse_concat");
    const auto img = random_var({3, 16, 16}, rng, 0, 1);
    const Var<double> raster(mask_tensor<double>(square(16, 3, 5, 9)));
    return grad_outcome([&] { return readout(ve(img, raster), 12); }, params, 9);
  });
  add("decoder_bce", [&] {
    std::mt19937_64 rng(6);
    Decoder<double> dec(enc, rng);
    SegHead<double> head(enc.value_dim, rng);
    for (auto* c : {&dec.skip4, &dec.skip3, &dec.block1, &dec.block2, &head.c1, &head.c2}) {
      c->b.mutable_value() = random_tensor(c->b.shape(), rng, -0.2, 0.2);
    }
    ParameterList<double> params;
    dec.collect(params, "decoder");
    head.collect(params, "head");
    const auto x = random_var({8, 2, 2}, rng), l4 = random_var({8, 4, 4}, rng), l3 = random_var({4, 8, 8}, rng);
    const Tensor<double> target = mask_tensor<double>(square(16, 2, 5, 8)).reshaped({16, 16});
    return grad_outcome([&] {
      return numerics::bce_loss(numerics::sigmoid(dec(x, l4, l3, head.weights(), 16, 16)), target);
    }, params, 6);
  });
  add("hypernet_decode", [&] {
    std::mt19937_64 rng(7);
    HyperNet<double> hn(8, enc.value_dim, rng);
    Decoder<double> dec(enc, rng);
    ParameterList<double> params;
    hn.collect(params, "hyper");
    dec.collect(params, "decoder");
    const auto gap = random_var({8, 1, 1}, rng, 0, 2);
    const auto x = random_var({8, 2, 2}, rng), l4 = random_var({8, 4, 4}, rng), l3 = random_var({4, 8, 8}, rng);
    const Tensor<double> target = mask_tensor<double>(square(16, 4, 2, 7)).reshaped({16, 16});
    return grad_outcome([&] {
      return numerics::bce_loss(numerics::sigmoid(dec(x, l4, l3, hn(gap), 16, 16)), target);
    }, params, 7);
  });
  add("memory_readout", [&] {
    std::mt19937_64 rng(8);
    Parameter<double> k1(random_tensor({4, 3}, rng)), k2(random_tensor({4, 2}, rng));
    Parameter<double> v1(random_tensor({5, 3}, rng)), v2(random_tensor({5, 2}, rng)), q(random_tensor({4, 6}, rng));
    ParameterList<double> params{{"k1", &k1}, {"k2", &k2}, {"v1", &v1}, {"v2", &v2}, {"query", &q}};
    return grad_outcome([&] {
      MemoryBank<double> bank;
      bank.insert_entry(k1.var, v1.var, 0);
      bank.insert_entry(k2.var, v2.var, 5);
      return readout(read(affinity(q.var, bank), bank), 11);
    }, params, 8);
  });
  return out;
}

std::vector<CheckResult> attention_suite() {
  std::vector<CheckResult> out;
  auto add = [&](const std::string& name, const std::function<Outcome()>& fn) {
    out.push_back(timed("attention", name, fn));
  };
  add("row_normalization", [] {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> dim(1, 6), ch(1, 8);
    std::uniform_real_distribution<double> mag(0.1, 10.0);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const int cf = ch(rng), cs = ch(rng), c = ch(rng);
      const double m = mag(rng);
      const auto f = random_var({cf, dim(rng), dim(rng)}, rng, -m, m);
      const auto s = random_var({cs, dim(rng), dim(rng)}, rng, -m, m);
      const bool kv = trial % 2 == 0;
      CrossProjections<double> proj(kv ? cf : cs, kv ? cs : cf, c, false, rng);
      const auto w = (kv ? cross_kv(f, s, proj) : cross_q(f, s, proj)).attention.weights.value();
      for (int p = 0; p < w.dim(0); ++p) {
        double sum = 0;
        for (int q = 0; q < w.dim(1); ++q) {
          if (w.at(p, q) < 0 || w.at(p, q) > 1) return Outcome{false, "weight outside [0, 1]"};
          sum += w.at(p, q);
        }
        worst = std::max(worst, std::abs(sum - 1));
      }
    }
    return Outcome{worst <= 1e-6, "100 fuzz cases, max |row sum - 1| " + sci(worst) + " (<= 1e-6)"};
  });
  add("tied_logit_transpose", [] {
    std::mt19937_64 rng(32);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
      CrossProjections<double> kv(6, 6, 8, true, rng), q(6, 6, 8, true, rng);
      q.q.w.mutable_value() = kv.q.w.value();
      kv.q.b.mutable_value() = random_tensor({8}, rng);
      q.q.b.mutable_value() = kv.q.b.value();
      const auto f = random_var({6, 4, 4}, rng), s = random_var({6, 3, 5}, rng);
      const auto a = cross_kv(f, s, kv).scores.value(), b = cross_q(f, s, q).scores.value();
      for (int i = 0; i < a.dim(0); ++i)
        for (int j = 0; j < a.dim(1); ++j) worst = std::max(worst, std::abs(a.at(i, j) - b.at(j, i)));
    }
    return Outcome{worst < 1e-6, "20 cases, max |S_kv - S_q^T| " + sci(worst) + " (< 1e-6)"};
  });
  add("gap_gate", [] {
    std::mt19937_64 rng(33);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
      CrossProjections<double> proj(6, 7, 8, false, rng);
      proj.v.b.mutable_value() = random_tensor({8}, rng);
      const auto f = random_var({6, 4, 4}, rng), gap = random_var({7, 1, 1}, rng, -3, 3);
      const auto o = cross_kv(f, gap, proj).fused.value();
      const auto q = project(f, proj.q).value(), v = project(gap, proj.v).value();
      for (int c = 0; c < 8; ++c)
        for (int p = 0; p < 16; ++p) worst = std::max(worst, std::abs(o.at(c, p) - v.at(c, 0) * q.at(c, p)));
    }
    return Outcome{worst < 1e-6, "20 cases, max |O - V_s * Q_f| " + sci(worst) + " (< 1e-6)"};
  });
  add("key_permutation_invariance", [] {
    std::mt19937_64 rng(34);
    double worst = 0;
    for (int trial = 0; trial < 10; ++trial) {
      CrossProjections<double> proj(6, 5, 8, false, rng);
      const auto f = random_var({6, 4, 4}, rng);
      const Tensor<double> s = random_tensor({5, 3, 4}, rng);
      std::vector<int> perm(12);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Tensor<double> sp(s.shape());
      for (int c = 0; c < 5; ++c)
        for (int r = 0; r < 12; ++r) sp[c * 12 + r] = s[c * 12 + perm[r]];
      const auto a = cross_kv(f, Var<double>(s), proj), b = cross_kv(f, Var<double>(sp), proj);
      for (std::size_t i = 0; i < a.fused.value().size(); ++i) {
        worst = std::max(worst, std::abs(a.fused.value()[i] - b.fused.value()[i]));
      }
      for (int p = 0; p < 16; ++p)
        for (int r = 0; r < 12; ++r) {
          worst = std::max(worst, std::abs(b.attention.weights.value().at(p, r) -
                                           a.attention.weights.value().at(p, perm[r])));
        }
    }
    return Outcome{worst < 1e-6, "10 permutations, max |delta| " + sci(worst) + " (< 1e-6)"};
  });
  add("multi_level_decomposition", [] {
    std::mt19937_64 rng(35);
    double worst = 0;
    for (Design d : {Design::cross_kv, Design::cross_q}) {
      const bool kv = d == Design::cross_kv;
      VisualFeatures<double> vf{random_var({4, 8, 8}, rng), random_var({6, 4, 4}, rng), random_var({8, 2, 2}, rng),
                                random_var({4, 2, 2}, rng)};
      const auto s = random_var({8, 2, 2}, rng);
      CrossProjections<double> p4(kv ? 6 : 8, kv ? 8 : 6, 8, false, rng), p5(8, 8, 8, false, rng);
      const auto sum = fuse_multi_level(d, vf, s, p4, p5).value();
      const auto a = numerics::bilinear_resize(fuse_level(d, vf.l4, s, p4), 4, 4).value();
      const auto b = numerics::bilinear_resize(fuse_level(d, vf.l5, s, p5), 4, 4).value();
      for (std::size_t i = 0; i < sum.size(); ++i) worst = std::max(worst, std::abs(sum[i] - a[i] - b[i]));
    }
    return Outcome{worst < 1e-6, "max |multi - (L4 + L5)| " + sci(worst) + " (< 1e-6)"};
  });
  return out;
}

std::vector<CheckResult> memory_suite() {
  std::vector<CheckResult> out;
  auto add = [&](const std::string& name, const std::function<Outcome()>& fn) {
    out.push_back(timed("memory", name, fn));
  };
  add("affinity_column_normalization", [] {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> n(1, 5), ck(1, 8);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const int c = ck(rng);
      MemoryBank<double> bank;
      const int entries = n(rng);
      for (int e = 0; e < entries; ++e) {
        const int pos = n(rng);
        bank.insert_entry(random_var({c, pos}, rng, -3, 3), random_var({2, pos}, rng), e);
      }
      const auto w = affinity(random_var({c, n(rng)}, rng, -3, 3), bank).value();
      for (int p = 0; p < w.dim(1); ++p) {
        double s = 0;
        for (int r = 0; r < w.dim(0); ++r) s += w.at(r, p);
        worst = std::max(worst, std::abs(s - 1));
      }
    }
    return Outcome{worst <= 1e-6, "100 random banks, max |column sum - 1| " + sci(worst) + " (<= 1e-6)"};
  });
  add("two_key_closed_form", [] {
    std::mt19937_64 rng(42);
    double worst = 0;
    for (double d : {0.05, 0.3, 0.8, 1.0, 1.5, 2.2, 3.0}) {
      const Tensor<double> q = random_tensor({6, 1}, rng);
      const Tensor<double> dir = random_tensor({6, 1}, rng);
      double norm = 0;
      for (double v : dir.values()) norm += v * v;
      norm = std::sqrt(norm);
      Tensor<double> k({6, 2});
      for (int r = 0; r < 6; ++r) {
        k.at(r, 0) = q[r];
        k.at(r, 1) = q[r] + d * dir[r] / norm;
      }
      MemoryBank<double> bank;
      bank.insert_entry(Var<double>(k), random_var({3, 2}, rng), 0);
      const double w = affinity(Var<double>(q), bank).value()[0];
      worst = std::max(worst, std::abs(w - 1.0 / (1.0 + std::exp(-d * d))));
    }
    return Outcome{worst < 1e-6, "7 distances, max |w - 1/(1+exp(-d^2))| " + sci(worst) + " (< 1e-6)"};
  });
  add("insertion_count_arithmetic", [] {
    std::string bad;
    for (int T : {1, 5, 6, 20}) {
      for (int k : {1, 5}) {
        MemoryBank<double> bank;
        for (int t = 0; t < T; ++t) {
          bank.insert(Var<double>(Tensor<double>({2, 1})), Var<double>(Tensor<double>({2, 1})), t, k);
          if (bank.entries().size() != static_cast<std::size_t>(1 + t / k)) {
            bad += " T=" + std::to_string(T) + ",k=" + std::to_string(k) + ",t=" + std::to_string(t);
          }
        }
      }
    }
    // Same arithmetic through full propagation, with the concat design's reference entry.
    std::mt19937_64 rng(43);
    std::vector<Tensor<double>> frames;
    for (int t = 0; t < 20; ++t) frames.push_back(random_tensor({3, 16, 16}, rng));
    const Var<double> ref(mask_tensor<double>(square(16, 4, 4, 6)));
    numerics::NoGradGuard no_grad;
    for (Design d : {Design::concat, Design::cross_q}) {
      ModelConfig cfg;
      cfg.encoder = small_encoder();
      cfg.fusion.design = d;
      cfg.fusion.channels = 8;
      const Model<double> m(cfg, 1);
      for (int T : {1, 5, 6, 20}) {
        for (int k : {1, 5}) {
          const auto trace = m.run([&](int t) { return Var<double>(frames[t]); }, T, ref,
                                   [k](int t) { return should_insert(t, k); });
          const std::size_t expect = 1 + (T - 1) / k + (d == Design::concat ? 1 : 0);
          if (trace.entries.size() != expect) {
            bad += " " + std::string(to_string(d)) + ":T=" + std::to_string(T) + ",k=" + std::to_string(k);
          }
        }
      }
    }
    return Outcome{bad.empty(), bad.empty() ? "T in {1,5,6,20}, every_k in {1,5}: exact" : "mismatch:" + bad};
  });
  add("read_loop_oracle", [] {
    std::mt19937_64 rng(44);
    MemoryBank<double> bank;
    bank.insert_entry(random_var({3, 4}, rng), random_var({5, 4}, rng), 0);
    bank.insert_entry(random_var({3, 2}, rng), random_var({5, 2}, rng), 5);
    const Tensor<double> w = random_tensor({6, 7}, rng, 0, 1);
    const auto got = read(Var<double>(w), bank).value();
    const auto vals = bank.values().value();
    double worst = 0;
    for (int c = 0; c < 5; ++c)
      for (int p = 0; p < 7; ++p) {
        double acc = 0;
        for (int r = 0; r < 6; ++r) acc += vals.at(c, r) * w.at(r, p);
        worst = std::max(worst, std::abs(acc - got.at(c, p)));
      }
    return Outcome{worst < 1e-6, "max |read - loop| " + sci(worst) + " (< 1e-6)"};
  });
  return out;
}

}  // namespace sketchvos::checks
