#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "daqc/analysis.hpp"
#include "daqc/noise.hpp"

namespace daqc {

/// Settings shared by sweep, durations and tradeoff.  Loaded from a JSON file
/// (same keys) and then overridden by flags.
struct ExperimentConfig {
  std::string algorithm = "star-qft";
  std::vector<std::string> paradigms = {"dqc", "sdaqc", "bdaqc"};
  int n_min = 3;
  int n_max = 7;
  double gbar_mhz = 10.0;
  double sqg_time_ns = 5.0;
  double tqg_time_ns = 50.0;
  int iterations = 1000;
  std::uint64_t seed = 2024;
  /// "allow" or "reject"; see ShortBlockPolicy.
  std::string short_blocks = "allow";
  int threads = 0;
  NoiseTargets noise{};

  /// Throws ConfigError with the offending key.
  void validate(int max_n) const;
  ExperimentSettings settings() const;
  std::vector<Paradigm> paradigm_list() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

/// "3..8", "5" or "3,5,6".
std::vector<int> parse_n_list(const std::string& s);

/// Runs one command line (args excludes the program name).  Returns the exit
/// code: 0 ok, 2 configuration error, 3 compile diagnostic, 4 numerical
/// failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace daqc
