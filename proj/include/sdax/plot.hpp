#pragma once
// Minimal SVG emission for learning and lambda curves: mean +/- 1 std bands
// across seeds, one curve per run group.

#include <map>
#include <string>
#include <vector>

namespace sdax {

// column name -> series; throws on missing/unreadable file
std::map<std::string, std::vector<double>> parse_metrics_csv(
    const std::string& path);

// Groups files by filename with a trailing "_seed<k>" stripped; one band per
// group. Writes an SVG with the chosen metric column over iterations.
void plot_metric_svg(const std::vector<std::string>& metrics_files,
                     const std::string& column, const std::string& title,
                     const std::string& out_svg);

}  // namespace sdax
