#pragma once

#include "sesop/trace.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sesop::bench {

enum class Axis { iter, matvecs, cum_cg, wall_ms };
enum class Series { f, f_gap, stationarity, snr_db };

std::string to_string(Axis a);
std::string to_string(Series s);
Axis parse_axis(std::string_view text);
Series parse_series(std::string_view text);

using NamedTrace = std::pair<std::string, Trace>;

/// Tab-separated table: first column the axis, then one column per trace.
/// Rows sit at the union of all traces' axis values; each trace contributes
/// its last row at or before that value (step interpolation), "NaN" before
/// its first row or where the series is missing.
///
/// Throws Error("incomparable traces") if the traces carry different
/// "problem" headers, and Error for wall_ms on traces recorded without
/// timing.
std::string emit_plot_data(const std::vector<NamedTrace>& traces, Axis axis,
                           Series series = Series::f);

/// Gnuplot script plotting every column of a table written by emit_plot_data.
std::string gnuplot_script(const std::string& table_file, const std::vector<std::string>& names,
                           Axis axis, Series series);

}  // namespace sesop::bench
