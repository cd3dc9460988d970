#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "sketchvos/dataio/dataset.hpp"
#include "sketchvos/train/train.hpp"

namespace sketchvos::cli {

using json = nlohmann::json;

/// One experiment file with sections data, encoder, fusion, train, eval.
struct RunConfig {
  train::TrainConfig train;
  std::optional<dataio::Split> eval_split = dataio::Split::val;  // nullopt: every sequence
};

/// Unknown sections or keys raise ConfigError. Missing keys keep defaults.
/// train.lr is a number or a preset name ("paper", "toy").
RunConfig run_config_from_json(const json& j);
RunConfig load_run_config(const std::filesystem::path& path);
json to_json(const RunConfig& c);

/// Defaults for every key, as written by `sketchvos config`.
json reference_config();

}  // namespace sketchvos::cli
