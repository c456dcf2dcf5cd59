#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "photonbound/cli/config.hpp"

namespace photonbound::cli {

enum class Method { Analytical, Lp, Both };

struct RunConfig {
  std::string command;
  Config config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::optional<Method> method;
  std::string table_path;  // estimate
  std::string figure;      // demo
};

Method parse_method(const std::string& name);

// Each command writes its files under cfg.out_dir and returns the paths
// written, one per line.
std::string cmd_estimate(const RunConfig& cfg);
std::string cmd_simulate_qkd(const RunConfig& cfg);
std::string cmd_simulate_tcspc(const RunConfig& cfg);
std::string cmd_demo(const RunConfig& cfg);

// Exit codes: 0 success, 2 usage or config error, 3 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace photonbound::cli
