#pragma once

#include <cstdint>
#include <string>

#include "eat/errors.hpp"
#include "eat/sfc.hpp"

namespace eat {

// Geometry and training-relevant settings of one EAT model. JSON config
// files use exactly these field names in snake_case.
struct EatConfig {
  std::string variant = "custom";
  int image_size = 28;            // square input side, pixels
  int channels = 1;
  std::string sfc_mode = "sis:4";  // sweep | scan | zorder | hilbert | sis:<s>
  int slice_len = 16;             // pixels per token
  int embed_dim = 64;
  int depth = 4;                  // encoder blocks
  int msa_heads = 2;              // heads on the global path (width d1)
  int head_layers = 2;            // cross-attention layers in the task head
  int head_heads = 0;             // heads in the task head; 0 = msa_heads
  int ffn_ratio = 4;
  double local_ratio = 0.5;       // fraction of channels on the local path
  int kernel_size = 3;            // local 1D conv kernel (odd)
  int class_count = 10;
  uint64_t seed = 0;

  // Derived geometry.
  long long pixel_count() const {
    return static_cast<long long>(image_size) * image_size;
  }
  int tokens() const { return static_cast<int>(pixel_count() / slice_len); }
  int local_width() const {
    return static_cast<int>(local_ratio * embed_dim);  // d2 = floor(p*d)
  }
  int global_width() const { return embed_dim - local_width(); }
  int task_tokens() const { return 1; }
  int effective_head_heads() const { return head_heads > 0 ? head_heads : msa_heads; }

  // Throws InvalidConfig naming the violated constraint.
  void validate() const;

  // Named presets: eat-ti, eat-s, eat-m, eat-b.
  static EatConfig variant_config(const std::string& name);
};

}  // namespace eat
