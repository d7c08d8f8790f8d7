#include "eat/eat_config.hpp"

#include "eat/sfc.hpp"

namespace eat {

void EatConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidConfig(what); };
  if (image_size < 1) fail("image_size must be >= 1");
  if (channels < 1) fail("channels must be >= 1");
  if (embed_dim < 1) fail("embed_dim must be >= 1");
  if (depth < 1) fail("depth must be >= 1");
  if (head_layers < 1) fail("head_layers must be >= 1");
  if (ffn_ratio < 1) fail("ffn_ratio must be >= 1");
  if (class_count < 1) fail("class_count must be >= 1");
  if (local_ratio < 0.0 || local_ratio > 1.0) fail("local_ratio must be in [0, 1]");
  if (kernel_size < 1 || kernel_size % 2 == 0) fail("kernel_size must be odd and >= 1");
  if (slice_len < 1) fail("slice_len must be >= 1");
  if (pixel_count() % slice_len != 0) {
    fail("slice_len " + std::to_string(slice_len) + " does not divide the " +
         std::to_string(pixel_count()) + "-pixel image");
  }
  if (msa_heads < 1) fail("msa_heads must be >= 1");
  const int d1 = global_width();
  if (d1 > 0 && d1 % msa_heads != 0) {
    fail("msa_heads " + std::to_string(msa_heads) + " does not divide the global width " +
         std::to_string(d1));
  }
  const int hh = effective_head_heads();
  if (hh < 1 || embed_dim % hh != 0) {
    fail("head_heads " + std::to_string(hh) + " does not divide embed_dim " +
         std::to_string(embed_dim));
  }
  // The SFC must be definable on the input grid.
  const sfc::CurveKind kind = sfc::CurveKind::parse(sfc_mode);
  sfc::validate(kind, sfc::Grid{image_size, image_size, 1});
}

EatConfig EatConfig::variant_config(const std::string& name) {
  EatConfig cfg;
  cfg.variant = name;
  cfg.image_size = 224;
  cfg.channels = 3;
  cfg.sfc_mode = "sis:16";
  cfg.slice_len = 256;
  cfg.depth = 12;
  cfg.head_layers = 2;
  cfg.ffn_ratio = 4;
  cfg.local_ratio = 0.5;
  cfg.kernel_size = 3;
  cfg.class_count = 1000;
  if (name == "eat-ti") {
    cfg.embed_dim = 192;
    cfg.msa_heads = 2;
    cfg.head_heads = 4;
  } else if (name == "eat-s") {
    cfg.embed_dim = 384;
    cfg.msa_heads = 3;
    cfg.head_heads = 8;
  } else if (name == "eat-m") {
    cfg.embed_dim = 576;
    cfg.msa_heads = 4;
    cfg.head_heads = 12;
  } else if (name == "eat-b") {
    cfg.embed_dim = 768;
    cfg.msa_heads = 6;
    cfg.head_heads = 16;
  } else {
    throw InvalidConfig("unknown variant '" + name +
                        "' (expected eat-ti|eat-s|eat-m|eat-b)");
  }
  return cfg;
}

}  // namespace eat
