#include "sesop/trace.hpp"

#include "sesop/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#ifndef SESOP_VERSION_STRING
#define SESOP_VERSION_STRING "0.0.0"
#endif

namespace sesop {

namespace {
constexpr const char* kSchema = "sesop-trace/1";
constexpr const char* kColumns = "iter,cum_steps,f,f_gap,stationarity,matvecs,hvps,wall_ms,snr_db";

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::optional<double> parse_optional(const std::string& s) {
  if (trim(s).empty()) return std::nullopt;
  return parse_double(s);
}
}  // namespace

std::string library_version() { return SESOP_VERSION_STRING; }

std::string to_string(Status s) {
  switch (s) {
    case Status::running: return "running";
    case Status::converged: return "converged";
    case Status::target_reached: return "target_reached";
    case Status::max_iterations: return "max_iterations";
    case Status::max_matvecs: return "max_matvecs";
    case Status::max_cg_steps: return "max_cg_steps";
    case Status::stalled: return "stalled";
    case Status::failed: return "failed";
  }
  return "unknown";
}

void Trace::set_header(const std::string& key, const std::string& value) {
  for (auto& [k, v] : header)
    if (k == key) {
      v = value;
      return;
    }
  header.emplace_back(key, value);
}

std::optional<std::string> Trace::header_value(const std::string& key) const {
  for (const auto& [k, v] : header)
    if (k == key) return v;
  return std::nullopt;
}

double recovery_snr_db(const Vector& x, const Vector& x_true) {
  const double err = (x - x_true).squaredNorm();
  if (err == 0.0) return INFINITY;
  return 10.0 * std::log10(x_true.squaredNorm() / err);
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "# schema: " << kSchema << '\n';
  for (const auto& [k, v] : trace.header) out << "# " << k << ": " << v << '\n';
  out << "# status: " << to_string(trace.status) << '\n';
  out << "# monotone: " << (trace.monotone ? "true" : "false") << '\n';
  for (const auto& e : trace.events) out << "# event: " << e << '\n';
  out << kColumns << '\n';
  for (const TraceRow& r : trace.rows) {
    out << r.iter << ',' << r.cum_steps << ',' << format_double(r.f) << ','
        << optional_field(r.f_gap) << ',' << format_double(r.stationarity) << ',' << r.matvecs
        << ',' << r.hvps << ',' << format_double(r.wall_ms) << ',' << optional_field(r.snr_db)
        << '\n';
  }
}

Trace read_trace_csv(std::istream& in) {
  Trace trace;
  std::string line;
  bool seen_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      const std::size_t colon = body.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(std::string_view(body).substr(0, colon));
      const std::string value = trim(std::string_view(body).substr(colon + 1));
      if (key == "schema") {
        if (value != kSchema) throw Error("unsupported trace schema '" + value + "'");
      } else if (key == "status") {
        for (Status s : {Status::running, Status::converged, Status::target_reached,
                         Status::max_iterations, Status::max_matvecs, Status::max_cg_steps,
                         Status::stalled, Status::failed})
          if (to_string(s) == value) trace.status = s;
      } else if (key == "monotone") {
        trace.monotone = value == "true";
      } else if (key == "event") {
        trace.events.push_back(value);
      } else {
        trace.header.emplace_back(key, value);
      }
      continue;
    }
    if (!seen_columns) {
      if (trim(line) != kColumns) throw Error("unexpected trace columns: " + line);
      seen_columns = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 9) throw Error("malformed trace row: " + line);
    TraceRow r;
    r.iter = parse_int(f[0]);
    r.cum_steps = parse_int(f[1]);
    r.f = parse_double(f[2]);
    r.f_gap = parse_optional(f[3]);
    r.stationarity = parse_double(f[4]);
    r.matvecs = parse_int(f[5]);
    r.hvps = parse_int(f[6]);
    r.wall_ms = parse_double(f[7]);
    r.snr_db = parse_optional(f[8]);
    trace.rows.push_back(r);
  }
  if (!seen_columns) throw Error("trace has no column line");
  return trace;
}

TraceRecorder::TraceRecorder(Trace& trace, const RunOptions& options, const Counters& counters)
    : trace_(trace), options_(options), counters_(counters),
      start_(std::chrono::steady_clock::now()) {
  trace_.set_header("library_version", library_version());
  trace_.set_header("timing", options.record_time ? "1" : "0");
}

void TraceRecorder::record(Index iter, std::int64_t cum_steps, double f, double stationarity,
                           const Vector& x) {
  TraceRow row;
  row.iter = iter;
  row.cum_steps = cum_steps;
  row.f = f;
  if (options_.f_opt) row.f_gap = f - *options_.f_opt;
  row.stationarity = stationarity;
  row.matvecs = counters_.matvecs;
  row.hvps = counters_.hvps;
  if (options_.record_time)
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            start_)
                      .count();
  if (options_.x_true) row.snr_db = recovery_snr_db(x, *options_.x_true);
  trace_.rows.push_back(row);
  observe(iter, cum_steps, x, false);
}

void TraceRecorder::observe(Index iter, std::int64_t cum_steps, const Vector& x,
                            bool inner) const {
  if (options_.observer) options_.observer(IterateEvent{iter, cum_steps, x, inner});
}

Status StopRule::check(Index iter, double f, double stationarity, const Counters& counters,
                       std::int64_t cum_steps) {
  if (!std::isfinite(f)) return Status::failed;
  if (!initial_) initial_ = stationarity;
  if (stationarity <= criteria_.grad_tol * std::max(1.0, *initial_)) return Status::converged;
  if (criteria_.f_tol && options_.f_opt && f - *options_.f_opt <= *criteria_.f_tol)
    return Status::target_reached;
  if (iter >= criteria_.max_iters) return Status::max_iterations;
  if (counters.matvecs >= criteria_.max_matvecs) return Status::max_matvecs;
  if (criteria_.max_cg_steps > 0 && cum_steps >= criteria_.max_cg_steps)
    return Status::max_cg_steps;
  return Status::running;
}

}  // namespace sesop
