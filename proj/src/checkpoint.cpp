#include "eat/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "eat/config_json.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace eat::nn {

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'E', 'A', 'T', 'C', 'K', 'P', 'T', '1'};
constexpr int kFormatVersion = 1;

struct Entry {
  std::string name;
  diff::Shape shape;
  uint64_t offset = 0;
  const std::vector<float>* data = nullptr;
};

json manifest_json(const std::vector<Entry>& entries) {
  json arr = json::array();
  for (const auto& e : entries) {
    json t;
    t["name"] = e.name;
    t["shape"] = e.shape;
    t["dtype"] = "f32";
    t["offset"] = e.offset;
    arr.push_back(t);
  }
  return arr;
}

}  // namespace

void save_checkpoint(EatModel<float>& model, const std::string& path,
                     const diff::Adam<float>* optimizer) {
  std::vector<Entry> entries;
  uint64_t offset = 0;
  auto append = [&](const std::string& name, const diff::Shape& shape,
                    const std::vector<float>& data) {
    entries.push_back({name, shape, offset, &data});
    offset += data.size() * sizeof(float);
  };
  model.visit([&](const std::string& name, diff::Tensor<float>& t) {
    append(name, t.shape(), t.values());
  });
  if (optimizer) {
    size_t i = 0;
    model.visit([&](const std::string& name, diff::Tensor<float>& t) {
      append("opt.m." + name, t.shape(), optimizer->moment1()[i]);
      append("opt.v." + name, t.shape(), optimizer->moment2()[i]);
      ++i;
    });
  }

  json header;
  header["format_version"] = kFormatVersion;
  header["config"] = json::parse(config_to_json(model.cfg));
  header["tensors"] = manifest_json(entries);
  if (optimizer) header["optimizer"] = {{"t", optimizer->t()}};
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  const uint32_t header_len = static_cast<uint32_t>(header_text.size());
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& e : entries) {
    out.write(reinterpret_cast<const char*>(e.data->data()),
              static_cast<std::streamsize>(e.data->size() * sizeof(float)));
  }
  if (!out) throw IoError("write failure on checkpoint '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");

  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic)) {
    throw CorruptCheckpoint("'" + path + "': truncated magic at byte offset 0");
  }
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw CorruptCheckpoint("'" + path + "': bad magic at byte offset 0");
  }

  uint32_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (in.gcount() != sizeof(header_len)) {
    throw CorruptCheckpoint("'" + path + "': truncated header length at byte offset 8");
  }

  std::string header_text(header_len, '\0');
  in.read(header_text.data(), header_len);
  if (in.gcount() != static_cast<std::streamsize>(header_len)) {
    throw CorruptCheckpoint("'" + path + "': truncated header at byte offset 12");
  }

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    throw CorruptCheckpoint("'" + path + "': header is not valid JSON at byte offset 12: " +
                            e.what());
  }

  if (!header.contains("format_version") || !header["format_version"].is_number_integer()) {
    throw CorruptCheckpoint("'" + path + "': header lacks format_version");
  }
  const int version = header["format_version"].get<int>();
  if (version != kFormatVersion) {
    throw UnsupportedVersion("'" + path + "': format_version " + std::to_string(version) +
                             " (this build reads version 1)");
  }
  if (!header.contains("config") || !header.contains("tensors")) {
    throw CorruptCheckpoint("'" + path + "': header lacks config or tensor manifest");
  }

  LoadedCheckpoint loaded{
      EatModel<float>::build(config_from_json(header["config"].dump())), std::nullopt};

  std::map<std::string, diff::Tensor<float>*> params;
  loaded.model.visit([&](const std::string& name, diff::Tensor<float>& t) {
    params[name] = &t;
  });

  const uint64_t data_start = 12 + header_len;
  std::map<std::string, std::vector<float>> opt_tensors;
  std::map<std::string, bool> restored;
  for (auto& [name, _] : params) restored[name] = false;

  for (const auto& t : header["tensors"]) {
    const std::string name = t.at("name").get<std::string>();
    const diff::Shape shape = t.at("shape").get<diff::Shape>();
    const std::string dtype = t.at("dtype").get<std::string>();
    const uint64_t offset = t.at("offset").get<uint64_t>();
    if (dtype != "f32") {
      throw CorruptCheckpoint("'" + path + "': tensor '" + name + "' has dtype '" +
                              dtype + "' (only f32 is written)");
    }
    const uint64_t bytes = static_cast<uint64_t>(diff::numel(shape)) * sizeof(float);
    std::vector<float> data(diff::numel(shape));
    in.seekg(static_cast<std::streamoff>(data_start + offset));
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
    if (in.gcount() != static_cast<std::streamsize>(bytes)) {
      throw CorruptCheckpoint("'" + path + "': tensor '" + name +
                              "' truncated at byte offset " +
                              std::to_string(data_start + offset));
    }
    in.clear();

    if (name.rfind("opt.", 0) == 0) {
      opt_tensors[name] = std::move(data);
      continue;
    }
    auto it = params.find(name);
    if (it == params.end()) {
      throw CorruptCheckpoint("'" + path + "': manifest names unknown parameter '" +
                              name + "'");
    }
    if (restored[name]) {
      throw CorruptCheckpoint("'" + path + "': parameter '" + name +
                              "' appears twice in the manifest");
    }
    if (it->second->shape() != shape) {
      throw CorruptCheckpoint("'" + path + "': parameter '" + name + "' has shape " +
                              diff::shape_str(shape) + " but the config implies " +
                              diff::shape_str(it->second->shape()));
    }
    it->second->values() = std::move(data);
    restored[name] = true;
  }

  for (const auto& [name, ok] : restored) {
    if (!ok) {
      throw CorruptCheckpoint("'" + path + "': parameter '" + name +
                              "' missing from the manifest");
    }
  }

  if (header.contains("optimizer")) {
    OptimizerState state;
    state.t = header["optimizer"].at("t").get<int64_t>();
    loaded.model.visit([&](const std::string& name, diff::Tensor<float>&) {
      state.moment1.push_back(opt_tensors.at("opt.m." + name));
      state.moment2.push_back(opt_tensors.at("opt.v." + name));
    });
    loaded.optimizer = std::move(state);
  }
  return loaded;
}

}  // namespace eat::nn
