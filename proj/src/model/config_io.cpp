#include "sketchvos/model/config_io.hpp"

namespace sketchvos::model {

void require_known_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& section) {
  if (!obj.is_object()) throw ConfigError("section '" + section + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) {
      std::string valid;
      for (const char* a : allowed) valid += std::string(valid.empty() ? "" : ", ") + a;
      throw ConfigError("unknown key '" + key + "' in section '" + section + "' (valid: " + valid + ")");
    }
  }
}

namespace {

template <typename V>
void read_field(const json& j, const char* key, V& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const json::exception&) {
    throw ConfigError(section + "." + key + ": wrong type");
  }
}

}  // namespace

json to_json(const EncoderConfig& c) {
  return {{"widths", c.widths}, {"key_dim", c.key_dim}, {"value_dim", c.value_dim}};
}

json to_json(const FusionConfig& c) {
  return {{"design", to_string(c.design)},
          {"sketch_level", to_string(c.sketch_level)},
          {"visual_levels", to_string(c.visual_levels)},
          {"channels", c.channels},
          {"tied_projections", c.tied_projections}};
}

json to_json(const ModelConfig& c) {
  return {{"encoder", to_json(c.encoder)},
          {"fusion", to_json(c.fusion)},
          {"reference_kind", refgen::to_string(c.reference_kind)},
          {"every_k", c.every_k},
          {"affinity", to_string(c.affinity)}};
}

EncoderConfig encoder_config_from_json(const json& j) {
  require_known_keys(j, {"widths", "key_dim", "value_dim"}, "encoder");
  EncoderConfig c;
  read_field(j, "widths", c.widths, "encoder");
  read_field(j, "key_dim", c.key_dim, "encoder");
  read_field(j, "value_dim", c.value_dim, "encoder");
  c.validate();
  return c;
}

FusionConfig fusion_config_from_json(const json& j) {
  require_known_keys(j, {"design", "sketch_level", "visual_levels", "channels", "tied_projections"}, "fusion");
  FusionConfig c;
  std::string s;
  if (j.contains("design")) {
    read_field(j, "design", s, "fusion");
    c.design = parse_design(s);
    // convweight only runs on the pooled embedding
    if (c.design == Design::convweight && !j.contains("sketch_level")) c.sketch_level = SketchLevel::gap;
  }
  if (j.contains("sketch_level")) {
    read_field(j, "sketch_level", s, "fusion");
    c.sketch_level = parse_sketch_level(s);
  }
  if (j.contains("visual_levels")) {
    read_field(j, "visual_levels", s, "fusion");
    c.visual_levels = parse_visual_levels(s);
  }
  read_field(j, "channels", c.channels, "fusion");
  read_field(j, "tied_projections", c.tied_projections, "fusion");
  c.validate();
  return c;
}

ModelConfig model_config_from_json(const json& j) {
  require_known_keys(j, {"encoder", "fusion", "reference_kind", "every_k", "affinity"}, "model");
  ModelConfig c;
  if (j.contains("encoder")) c.encoder = encoder_config_from_json(j["encoder"]);
  if (j.contains("fusion")) c.fusion = fusion_config_from_json(j["fusion"]);
  if (j.contains("reference_kind")) {
    std::string s;
    read_field(j, "reference_kind", s, "model");
    c.reference_kind = refgen::parse_reference_kind(s);
  }
  read_field(j, "every_k", c.every_k, "model");
  if (j.contains("affinity")) {
    std::string s;
    read_field(j, "affinity", s, "model");
    c.affinity = parse_affinity(s);
  }
  c.validate();
  return c;
}

}  // namespace sketchvos::model
