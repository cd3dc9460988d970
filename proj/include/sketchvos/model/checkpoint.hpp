#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sketchvos/model/config_io.hpp"

namespace sketchvos::model {

/// Archive layout: 8-byte magic "SKVOSCK1", u64 header length, JSON header
/// {"model", "state", "manifest": [{name, shape, adam_step}]}, then per
/// manifest entry the float32 value, Adam first and second moments.
struct Checkpoint {
  struct Record {
    std::string name;
    Tensor<float> value;
    Tensor<float> first_moment;
    Tensor<float> second_moment;
    std::int64_t adam_step = 0;
  };
  ModelConfig config;
  json state = json::object();  // trainer bookkeeping, opaque here
  std::vector<Record> params;
};

/// Written through a temporary file and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config, const ParameterList<float>& params,
                     const json& state = json::object());

/// NotFoundError if absent, IntegrityError if truncated or malformed.
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Copies values and Adam state into `params`; names and shapes must match the
/// archive exactly (IntegrityError otherwise).
void install(const Checkpoint& ckpt, const ParameterList<float>& params);

/// Rebuilds the model from the archived config and installs its weights.
Model<float> load_model(const std::filesystem::path& path, json* state = nullptr);

}  // namespace sketchvos::model
