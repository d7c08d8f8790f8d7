#include "eat/config_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace eat {

namespace {
using nlohmann::json;
}

EatConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidConfig("config must be a JSON object");

  EatConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "variant") {
        cfg.variant = value.get<std::string>();
      } else if (key == "image_size") {
        cfg.image_size = value.get<int>();
      } else if (key == "channels") {
        cfg.channels = value.get<int>();
      } else if (key == "sfc_mode") {
        cfg.sfc_mode = value.get<std::string>();
      } else if (key == "slice_len") {
        cfg.slice_len = value.get<int>();
      } else if (key == "embed_dim") {
        cfg.embed_dim = value.get<int>();
      } else if (key == "depth") {
        cfg.depth = value.get<int>();
      } else if (key == "msa_heads") {
        cfg.msa_heads = value.get<int>();
      } else if (key == "head_layers") {
        cfg.head_layers = value.get<int>();
      } else if (key == "head_heads") {
        cfg.head_heads = value.get<int>();
      } else if (key == "ffn_ratio") {
        cfg.ffn_ratio = value.get<int>();
      } else if (key == "local_ratio") {
        cfg.local_ratio = value.get<double>();
      } else if (key == "kernel_size") {
        cfg.kernel_size = value.get<int>();
      } else if (key == "class_count") {
        cfg.class_count = value.get<int>();
      } else if (key == "seed") {
        cfg.seed = value.get<uint64_t>();
      } else {
        throw InvalidConfig("unknown config key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw InvalidConfig("config key '" + key + "': " + e.what());
    }
  }
  return cfg;
}

EatConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::string config_to_json(const EatConfig& cfg) {
  json j;
  j["variant"] = cfg.variant;
  j["image_size"] = cfg.image_size;
  j["channels"] = cfg.channels;
  j["sfc_mode"] = cfg.sfc_mode;
  j["slice_len"] = cfg.slice_len;
  j["embed_dim"] = cfg.embed_dim;
  j["depth"] = cfg.depth;
  j["msa_heads"] = cfg.msa_heads;
  j["head_layers"] = cfg.head_layers;
  j["head_heads"] = cfg.head_heads;
  j["ffn_ratio"] = cfg.ffn_ratio;
  j["local_ratio"] = cfg.local_ratio;
  j["kernel_size"] = cfg.kernel_size;
  j["class_count"] = cfg.class_count;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

}  // namespace eat
