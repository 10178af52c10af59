#pragma once

// Subcommands of finsler-lab. Each returns its artifacts in memory; the
// caller writes them, so a run has a single writer.

#include <string>
#include <utility>
#include <vector>

#include "finsler/heat.hpp"
#include "run_config.hpp"

namespace finsler::lab {

enum ExitCode { kPass = 0, kCheckFailed = 1, kUsage = 2 };

struct Output {
  int code = kPass;
  std::string text;                                         // human-readable summary
  std::vector<std::pair<std::string, std::string>> files;  // name, content
};

Output cmd_norm_info(const RunConfig& cfg);
Output cmd_geodesic(const RunConfig& cfg);
Output cmd_curvature(const RunConfig& cfg);
Output cmd_heat(const RunConfig& cfg);
Output cmd_verify(const RunConfig& cfg);
Output cmd_isoperimetry(const RunConfig& cfg);

/// Conservation gate of cmd_heat: 1 when the energy increases or the mass
/// drifts by more than 1e-10, with the reason in *why.
template <int n>
int heat_gate(const FlowTrace<n>& tr, std::string* why) {
  if (tr.mass_drift() > 1e-10) {
    if (why) *why = "mass drift " + std::to_string(tr.mass_drift()) + " > 1e-10";
    return kCheckFailed;
  }
  if (!tr.energy_monotone()) {
    if (why) *why = "energy not monotone";
    return kCheckFailed;
  }
  return kPass;
}

/// Writes every file of `out` below dir (created if needed).
void write_outputs(const Output& out, const std::string& dir);

}  // namespace finsler::lab
