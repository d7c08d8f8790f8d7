#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eat/adam.hpp"
#include "eat/model.hpp"

namespace eat::nn {

// Optimizer state carried alongside the parameters.
struct OptimizerState {
  int64_t t = 0;
  std::vector<std::vector<float>> moment1;
  std::vector<std::vector<float>> moment2;
};

// Checkpoint layout: 8-byte magic "EATCKPT1", a 4-byte little-endian header
// length, a UTF-8 JSON header (format_version, config echo, ordered tensor
// manifest with name/shape/dtype/offset), then raw little-endian IEEE-754
// 32-bit tensor data in manifest order. Offsets are relative to the start
// of the data section.
void save_checkpoint(EatModel<float>& model, const std::string& path,
                     const diff::Adam<float>* optimizer = nullptr);

struct LoadedCheckpoint {
  EatModel<float> model;
  std::optional<OptimizerState> optimizer;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace eat::nn
