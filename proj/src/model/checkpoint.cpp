#include "sketchvos/model/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace sketchvos::model {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'S', 'K', 'V', 'O', 'S', 'C', 'K', '1'};

void write_tensor(std::ofstream& out, const Tensor<float>& t) {
  out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(float)));
}

void read_tensor(std::ifstream& in, Tensor<float>& t, const fs::path& path) {
  in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(float)));
  if (!in) throw IntegrityError(path.string() + ": truncated parameter data");
}

}  // namespace

void save_checkpoint(const fs::path& path, const ModelConfig& config, const ParameterList<float>& params,
                     const json& state) {
  json manifest = json::array();
  for (const auto& p : params) {
    manifest.push_back({{"name", p.name}, {"shape", p.param->shape()}, {"adam_step", p.param->step}});
  }
  const std::string header = json{{"model", to_json(config)}, {"state", state}, {"manifest", manifest}}.dump();

  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NotFoundError("cannot write " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    const std::uint64_t n = header.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(header.data(), static_cast<std::streamsize>(n));
    for (const auto& p : params) {
      write_tensor(out, p.param->value());
      write_tensor(out, p.param->first_moment);
      write_tensor(out, p.param->second_moment);
    }
    if (!out) throw IntegrityError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw NotFoundError("checkpoint " + path.string() + " does not exist");
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  std::uint64_t n = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IntegrityError(path.string() + ": not a sketchvos checkpoint");
  }
  if (n > static_cast<std::uint64_t>(fs::file_size(path))) throw IntegrityError(path.string() + ": bad header length");
  std::string header(n, '\0');
  in.read(header.data(), static_cast<std::streamsize>(n));
  if (!in) throw IntegrityError(path.string() + ": truncated header");

  Checkpoint ckpt;
  json h;
  try {
    h = json::parse(header);
    ckpt.config = model_config_from_json(h.at("model"));
    ckpt.state = h.value("state", json::object());
    for (const auto& m : h.at("manifest")) {
      Checkpoint::Record r;
      r.name = m.at("name").get<std::string>();
      const Shape shape = m.at("shape").get<Shape>();
      r.adam_step = m.at("adam_step").get<std::int64_t>();
      r.value = Tensor<float>(shape);
      r.first_moment = Tensor<float>(shape);
      r.second_moment = Tensor<float>(shape);
      ckpt.params.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw IntegrityError(path.string() + ": malformed header: " + e.what());
  }
  for (auto& r : ckpt.params) {
    read_tensor(in, r.value, path);
    read_tensor(in, r.first_moment, path);
    read_tensor(in, r.second_moment, path);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw IntegrityError(path.string() + ": trailing bytes");
  return ckpt;
}

void install(const Checkpoint& ckpt, const ParameterList<float>& params) {
  if (ckpt.params.size() != params.size()) {
    throw IntegrityError("checkpoint holds " + std::to_string(ckpt.params.size()) + " tensors, model expects " +
                         std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& r = ckpt.params[i];
    Parameter<float>& p = *params[i].param;
    if (r.name != params[i].name || r.value.shape() != p.shape()) {
      throw IntegrityError("checkpoint tensor '" + r.name + "' " + numerics::shape_str(r.value.shape()) +
                           " does not match model tensor '" + params[i].name + "' " +
                           numerics::shape_str(p.shape()));
    }
    p.mutable_value() = r.value;
    p.first_moment = r.first_moment;
    p.second_moment = r.second_moment;
    p.step = r.adam_step;
    p.zero_grad();
  }
}

Model<float> load_model(const fs::path& path, json* state) {
  const Checkpoint ckpt = read_checkpoint(path);
  Model<float> model(ckpt.config, 0);
  install(ckpt, model.parameters());
  if (state) *state = ckpt.state;
  return model;
}

}  // namespace sketchvos::model
