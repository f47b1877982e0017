#pragma once

#include "rcsync/experiments.hpp"

#include <stdexcept>
#include <string>

namespace rcsync {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Flat key-value configuration (`key = value`, `#` comments). Unset keys
/// take the defaults of the selected source preset; unknown or duplicate
/// keys are hard errors with line context. The schema is documented in
/// docs/config.md.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Canonical form: every key, fixed order, 17-digit numbers.
std::string serialize_config(const ExperimentConfig& cfg);

} // namespace rcsync
