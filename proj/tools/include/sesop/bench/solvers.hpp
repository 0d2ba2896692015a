#pragma once

#include "sesop/problems.hpp"
#include "sesop/trace.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sesop::bench {

/// "solver=NAME,key=value,..." or just "NAME,key=value,...".
struct SolverSpec {
  std::string name;
  std::map<std::string, std::string> params;

  std::string to_string() const;
  /// Short file-name friendly label, e.g. "sesop_tn_lmax10".
  std::string label() const;
  static SolverSpec parse(std::string_view text);

  bool operator==(const SolverSpec&) const = default;
};

const std::vector<std::string>& solver_names();
/// Parameter keys accepted by a solver; throws for an unknown name.
const std::vector<std::string>& solver_keys(const std::string& name);

/// Throws Error naming the valid alternatives when the name or a key is unknown.
void validate(const SolverSpec& spec);

/// Runs one solver on the problem from problem.x0. Stop criteria apply to
/// every solver; linear_cg maps grad_tol to its residual tolerance and
/// max_iters / max_cg_steps to its iteration cap.
SolveResult run_solver(const SolverSpec& spec, const Problem& problem, const StopCriteria& stop,
                       const RunOptions& options);

}  // namespace sesop::bench
