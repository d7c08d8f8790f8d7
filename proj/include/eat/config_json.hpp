#pragma once

#include <string>

#include "eat/eat_config.hpp"

namespace eat {

// Strict parse: every present key must be a known EatConfig field
// (snake_case); missing keys keep their defaults.
EatConfig config_from_json(const std::string& text);
EatConfig load_config_file(const std::string& path);
std::string config_to_json(const EatConfig& cfg);

}  // namespace eat
