#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qfl::experiments {

struct PropertyResult {
  std::string name;
  bool pass = false;
  nlohmann::json stats;
};

struct SuiteReport {
  std::string suite;
  std::vector<PropertyResult> properties;

  bool pass() const;
  nlohmann::json to_json() const;
};

/// invariants, lipschitz (alias lemma), dynkin, dpp, picard, chaos.
std::vector<std::string> suite_names();

/// Throws ConfigError for an unknown suite. threads = 0 picks the hardware
/// concurrency.
SuiteReport run_suite(const std::string& name, std::uint64_t seed, int threads);

}  // namespace qfl::experiments
