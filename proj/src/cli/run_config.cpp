#include "sketchvos/cli/run_config.hpp"

#include <fstream>

#include "sketchvos/model/config_io.hpp"

namespace sketchvos::cli {

namespace {

template <typename V>
void read_field(const json& j, const char* key, V& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("train.") + key + ": wrong type");
  }
}

std::string split_name(const std::optional<dataio::Split>& s) { return s ? std::string(dataio::to_string(*s)) : "all"; }

}  // namespace

RunConfig run_config_from_json(const json& j) {
  model::require_known_keys(j, {"data", "encoder", "fusion", "train", "eval"}, "config");
  RunConfig c;
  train::TrainConfig& t = c.train;
  if (j.contains("data")) {
    model::require_known_keys(j["data"], {"root"}, "data");
    if (j["data"].contains("root")) t.data = j["data"]["root"].get<std::string>();
  }
  if (j.contains("encoder")) t.model.encoder = model::encoder_config_from_json(j["encoder"]);
  if (j.contains("fusion")) t.model.fusion = model::fusion_config_from_json(j["fusion"]);
  if (j.contains("train")) {
    const json& tr = j["train"];
    model::require_known_keys(tr,
                              {"lr", "steps", "batch_size", "seed", "reference_kind", "every_k", "affinity", "eval_every",
                               "log_every", "sample_window", "flip_prob", "out"},
                              "train");
    if (tr.contains("lr")) {
      if (tr["lr"].is_string()) {
        t.lr = train::lr_preset(tr["lr"].get<std::string>());
      } else {
        read_field(tr, "lr", t.lr);
      }
    }
    read_field(tr, "steps", t.steps);
    read_field(tr, "batch_size", t.batch_size);
    read_field(tr, "seed", t.seed);
    read_field(tr, "every_k", t.model.every_k);
    if (tr.contains("affinity")) t.model.affinity = model::parse_affinity(tr["affinity"].get<std::string>());
    read_field(tr, "eval_every", t.eval_every);
    read_field(tr, "log_every", t.log_every);
    read_field(tr, "sample_window", t.sample_window);
    read_field(tr, "flip_prob", t.flip_prob);
    if (tr.contains("reference_kind")) {
      t.model.reference_kind = refgen::parse_reference_kind(tr["reference_kind"].get<std::string>());
    }
    if (tr.contains("out")) t.out_dir = tr["out"].get<std::string>();
  }
  if (j.contains("eval")) {
    model::require_known_keys(j["eval"], {"split"}, "eval");
    if (j["eval"].contains("split")) {
      const auto s = j["eval"]["split"].get<std::string>();
      c.eval_split = s == "all" ? std::nullopt : std::optional(dataio::parse_split(s));
    }
  }
  t.model.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("config file " + path.string() + " does not exist");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const RunConfig& c) {
  const train::TrainConfig& t = c.train;
  return {{"data", {{"root", t.data.string()}}},
          {"encoder", model::to_json(t.model.encoder)},
          {"fusion", model::to_json(t.model.fusion)},
          {"train",
           {{"lr", t.lr},
            {"steps", t.steps},
            {"batch_size", t.batch_size},
            {"seed", t.seed},
            {"reference_kind", refgen::to_string(t.model.reference_kind)},
            {"every_k", t.model.every_k},
            {"affinity", model::to_string(t.model.affinity)},
            {"eval_every", t.eval_every},
            {"log_every", t.log_every},
            {"sample_window", t.sample_window},
            {"flip_prob", t.flip_prob},
            {"out", t.out_dir.string()}}},
          {"eval", {{"split", split_name(c.eval_split)}}}};
}

json reference_config() {
  RunConfig c;
  c.train.data = "data/synth";
  c.train.out_dir = "runs/default";
  return to_json(c);
}

}  // namespace sketchvos::cli
