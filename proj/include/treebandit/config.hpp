#pragma once

#include <string>

#include "treebandit/experiment.hpp"

namespace treebandit {

// Parses the experiment config format: TOML-like sections of key = value
// lines, '#' comments, repeated [policy.NAME] sections. See the README for
// the full grammar. Throws ConfigError with line numbers on bad input.
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<stream>");
ExperimentConfig load_config(const std::string& path);

}  // namespace treebandit
