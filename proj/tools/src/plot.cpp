#include "sesop/bench/plot.hpp"

#include "sesop/text.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sesop::bench {

std::string to_string(Axis a) {
  switch (a) {
    case Axis::iter: return "iter";
    case Axis::matvecs: return "matvecs";
    case Axis::cum_cg: return "cum_cg";
    case Axis::wall_ms: return "wall_ms";
  }
  return "unknown";
}

std::string to_string(Series s) {
  switch (s) {
    case Series::f: return "f";
    case Series::f_gap: return "f_gap";
    case Series::stationarity: return "stationarity";
    case Series::snr_db: return "snr_db";
  }
  return "unknown";
}

Axis parse_axis(std::string_view text) {
  for (Axis a : {Axis::iter, Axis::matvecs, Axis::cum_cg, Axis::wall_ms})
    if (to_string(a) == text) return a;
  throw Error("unknown axis '" + std::string(text) + "' (valid: iter, matvecs, cum_cg, wall_ms)");
}

Series parse_series(std::string_view text) {
  for (Series s : {Series::f, Series::f_gap, Series::stationarity, Series::snr_db})
    if (to_string(s) == text) return s;
  throw Error("unknown series '" + std::string(text) +
              "' (valid: f, f_gap, stationarity, snr_db)");
}

namespace {

double axis_value(const TraceRow& row, Axis axis) {
  switch (axis) {
    case Axis::iter: return static_cast<double>(row.iter);
    case Axis::matvecs: return static_cast<double>(row.matvecs);
    case Axis::cum_cg: return static_cast<double>(row.cum_steps);
    case Axis::wall_ms: return row.wall_ms;
  }
  return 0.0;
}

std::optional<double> series_value(const TraceRow& row, Series series) {
  switch (series) {
    case Series::f: return row.f;
    case Series::f_gap: return row.f_gap;
    case Series::stationarity: return row.stationarity;
    case Series::snr_db: return row.snr_db;
  }
  return std::nullopt;
}

std::string cell(std::optional<double> v) {
  return v && std::isfinite(*v) ? format_double(*v) : "NaN";
}

}  // namespace

std::string emit_plot_data(const std::vector<NamedTrace>& traces, Axis axis, Series series) {
  if (traces.empty()) throw Error("no traces to plot");
  const auto problem = traces.front().second.header_value("problem");
  for (const auto& [name, trace] : traces) {
    if (trace.header_value("problem") != problem) throw Error("incomparable traces");
    if (axis == Axis::wall_ms && trace.header_value("timing") != "1")
      throw Error("trace '" + name + "' was recorded without timing");
  }

  std::vector<double> grid;
  for (const auto& nt : traces)
    for (const TraceRow& row : nt.second.rows) grid.push_back(axis_value(row, axis));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::ostringstream out;
  out << to_string(axis);
  for (const auto& nt : traces) out << '\t' << nt.first;
  out << '\n';

  // One cursor per trace; rows are ordered along every axis.
  std::vector<std::size_t> cursor(traces.size(), 0);
  for (double a : grid) {
    out << format_double(a);
    for (std::size_t t = 0; t < traces.size(); ++t) {
      const auto& rows = traces[t].second.rows;
      while (cursor[t] < rows.size() && axis_value(rows[cursor[t]], axis) <= a) ++cursor[t];
      out << '\t' << (cursor[t] == 0 ? "NaN" : cell(series_value(rows[cursor[t] - 1], series)));
    }
    out << '\n';
  }
  return out.str();
}

std::string gnuplot_script(const std::string& table_file, const std::vector<std::string>& names,
                           Axis axis, Series series) {
  std::ostringstream s;
  s << "set datafile separator '\\t'\n"
    << "set key autotitle columnhead\n"
    << "set xlabel '" << to_string(axis) << "'\n"
    << "set ylabel '" << to_string(series) << "'\n";
  if (series != Series::snr_db) s << "set logscale y\n";
  s << "plot";
  for (std::size_t i = 0; i < names.size(); ++i)
    s << (i ? ", \\\n    " : " ") << "'" << table_file << "' using 1:" << i + 2
      << " with steps";
  s << "\n";
  return s.str();
}

}  // namespace sesop::bench
