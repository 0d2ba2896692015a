#pragma once

#include "sesop/types.hpp"

#include <chrono>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sesop {

/// Library version string written into trace headers.
std::string library_version();

/// Stopping rules shared by all solvers. The first satisfied rule wins.
struct StopCriteria {
  /// Stop when the stationarity measure drops to grad_tol * max(1, initial measure).
  double grad_tol = 1e-8;
  /// Stop when f - f_opt <= f_tol (needs RunOptions::f_opt).
  std::optional<double> f_tol;
  Index max_iters = 100000;
  std::int64_t max_matvecs = 100000;
  /// Cap on cumulative CG (or inner) steps; 0 disables.
  std::int64_t max_cg_steps = 0;

  bool operator==(const StopCriteria&) const = default;
};

enum class Status {
  running,
  converged,      ///< stationarity tolerance met
  target_reached, ///< f - f_opt <= f_tol
  max_iterations,
  max_matvecs,
  max_cg_steps,
  stalled,        ///< no further decrease possible at working precision
  failed,
};

std::string to_string(Status s);

/// One iterate visited by a solver, reported to RunOptions::observer.
struct IterateEvent {
  Index iteration = 0;
  std::int64_t cum_steps = 0;
  const Vector& x;
  bool inner = false;  ///< inner (model) iterate rather than an accepted outer iterate
};

struct RunOptions {
  std::optional<double> f_opt;
  /// Planted signal; enables the snr_db column.
  std::optional<Vector> x_true;
  /// Measure wall-clock time per row. Off by default so that trace bodies are
  /// reproducible byte for byte.
  bool record_time = false;
  std::function<void(const IterateEvent&)> observer;
};

struct TraceRow {
  Index iter = 0;
  std::int64_t cum_steps = 0;  ///< cumulative CG / inner steps
  double f = 0.0;
  std::optional<double> f_gap;  ///< f - f_opt
  double stationarity = 0.0;    ///< gradient norm or SSF-step norm
  std::int64_t matvecs = 0;
  std::int64_t hvps = 0;
  double wall_ms = 0.0;
  std::optional<double> snr_db;
};

struct Trace {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<TraceRow> rows;
  Status status = Status::running;
  std::vector<std::string> events;
  /// Whether the solver guarantees f nonincreasing along rows.
  bool monotone = true;

  void set_header(const std::string& key, const std::string& value);
  std::optional<std::string> header_value(const std::string& key) const;
};

struct SolveResult {
  Vector x;
  Trace trace;
};

/// 10 log10(||x_true||^2 / ||x - x_true||^2).
double recovery_snr_db(const Vector& x, const Vector& x_true);

/// CSV with '#'-prefixed header lines; doubles in shortest round-trip form.
void write_trace_csv(const Trace& trace, std::ostream& out);
Trace read_trace_csv(std::istream& in);

/// Shared row bookkeeping for solver loops.
class TraceRecorder {
public:
  TraceRecorder(Trace& trace, const RunOptions& options, const Counters& counters);

  void record(Index iter, std::int64_t cum_steps, double f, double stationarity,
              const Vector& x);
  void observe(Index iter, std::int64_t cum_steps, const Vector& x, bool inner) const;

private:
  Trace& trace_;
  const RunOptions& options_;
  const Counters& counters_;
  std::chrono::steady_clock::time_point start_;
};

/// Evaluates the stop rules after an iteration; returns Status::running when
/// none applies.
class StopRule {
public:
  StopRule(const StopCriteria& criteria, const RunOptions& options)
      : criteria_(criteria), options_(options) {}

  Status check(Index iter, double f, double stationarity, const Counters& counters,
               std::int64_t cum_steps = 0);

private:
  const StopCriteria& criteria_;
  const RunOptions& options_;
  std::optional<double> initial_;
};

}  // namespace sesop
