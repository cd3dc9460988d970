#pragma once

#include <initializer_list>
#include <string>

#include "json.hpp"

#include "sketchvos/model/model.hpp"

namespace sketchvos::model {

using json = nlohmann::json;

/// Throws ConfigError naming the first key of `obj` outside `allowed`.
void require_known_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& section);

json to_json(const EncoderConfig& c);
json to_json(const FusionConfig& c);
json to_json(const ModelConfig& c);

/// Missing keys keep their defaults; unknown keys and bad values raise ConfigError.
EncoderConfig encoder_config_from_json(const json& j);
FusionConfig fusion_config_from_json(const json& j);
ModelConfig model_config_from_json(const json& j);

}  // namespace sketchvos::model
