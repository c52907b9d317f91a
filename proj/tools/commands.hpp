#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpt/instrument.hpp"
#include "gpt/thermo.hpp"

namespace gpt::cli {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string note;
};

/// Machine-readable outcome of one command run. Given the same seed and
/// inputs the JSON is byte-identical except for runtime_ms.
struct Report {
  std::string command;
  std::string target;
  std::uint64_t seed = 0;
  long trials = 0;
  std::vector<CheckResult> checks;
  long runtime_ms = 0;

  bool pass() const;
  std::string to_json() const;
  /// runtime_ms stripped; this is the determinism contract surface.
  std::string to_json_stable() const;
  std::string summary() const;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  long trials = 0;     // 0 = per-target default
  std::string model;   // optional override where a target supports it
  double tol = 0.0;    // 0 = per-check defaults
};

/// Targets: appendix-b, appendix-c, lemma1, theorem1, theorem2, theorem3.
Report run_verify(const std::string& target, const VerifyOptions& opts);

struct CycleOptions {
  std::string model = "qubit";
  std::string state;            // model-specific; empty = model default
  std::string decomp_q = "auto";
  std::string decomp_p = "auto";
  long N = 1;
  double kT = 1.0;
  int csv_steps = 50;
};

struct CycleOutput {
  CycleReport report;
  Report checks;      // cycle-closure bookkeeping, shares the Report format
  std::string report_json;
  std::string csv;
};

CycleOutput run_cycle(const CycleOptions& opts);

struct MajorizeOptions {
  std::string model;
  std::string state;
  std::string t_file;
  std::string s_file;
};

struct MajorizeOutput {
  bool feasible = false;
  Eigen::MatrixXd kernel;  // rows: s outcomes, cols: t outcomes
  bool have_info_gain = false;
  double info_gain_t = 0.0;
  double info_gain_s = 0.0;
  std::string report_json;
};

MajorizeOutput run_majorize(const MajorizeOptions& opts);

/// Parses a model-specific state spec ("mixed", "mix", "center", "vertex:k",
/// "bloch:x,y,z", or a comma list of ambient coordinates).
State parse_state(const SpacePtr& space, const std::string& spec);

/// Full command-line entry point; exit codes: 0 all checks pass, 1 violation
/// found, 2 usage or model error.
int cli_main(int argc, char** argv);

}  // namespace gpt::cli
