#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bmlab/harness/config.hpp"
#include "bmlab/harness/output.hpp"

namespace bmlab::harness {

inline constexpr const char* kCodeVersion = "bmlab 0.1.0";

struct RunContext {
  uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";
  bool write_outputs = true;  // `bmlab verify` runs assertions only
};

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  nlohmann::json summary;
  std::vector<Assertion> assertions;
  std::vector<OutputFileInfo> outputs;

  bool all_pass() const {
    for (const auto& a : assertions)
      if (!a.pass) return false;
    return true;
  }
};

struct ExperimentDef {
  std::string name;
  std::string description;
  std::map<std::string, std::set<std::string>> schema;
  ExperimentResult (*fn)(const Config&, const RunContext&);
};

const std::vector<ExperimentDef>& experiments();
const ExperimentDef* find_experiment(const std::string& name);

// Runs the experiment, validates the config against its schema, writes the
// manifest (when outputs are enabled) and returns the result.
ExperimentResult run_experiment(const ExperimentDef& def, const Config& cfg,
                                const RunContext& ctx);

}  // namespace bmlab::harness
