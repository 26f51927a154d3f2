#include "sdax/plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace sdax {

std::map<std::string, std::vector<double>> parse_metrics_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file: " + path);
  std::string line;
  std::vector<std::string> cols;
  std::map<std::string, std::vector<double>> out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (cols.empty()) {
      while (std::getline(ss, cell, ',')) {
        cols.push_back(cell);
        out[cell] = {};
      }
      continue;
    }
    int i = 0;
    while (std::getline(ss, cell, ',') && i < static_cast<int>(cols.size()))
      out[cols[i++]].push_back(std::stod(cell));
  }
  if (cols.empty()) throw std::runtime_error("empty metrics file: " + path);
  return out;
}

namespace {

struct Band {
  std::vector<double> mean, lo, hi;
};

Band band_of(const std::vector<std::vector<double>>& series) {
  std::size_t n = series.front().size();
  for (const auto& s : series) n = std::min(n, s.size());
  Band b;
  b.mean.resize(n);
  b.lo.resize(n);
  b.hi.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    double m = 0.0;
    for (const auto& s : series) m += s[t];
    m /= series.size();
    double var = 0.0;
    for (const auto& s : series) var += (s[t] - m) * (s[t] - m);
    const double sd =
        series.size() > 1 ? std::sqrt(var / series.size()) : 0.0;
    b.mean[t] = m;
    b.lo[t] = m - sd;
    b.hi[t] = m + sd;
  }
  return b;
}

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void plot_metric_svg(const std::vector<std::string>& metrics_files,
                     const std::string& column, const std::string& title,
                     const std::string& out_svg) {
  if (metrics_files.empty())
    throw std::runtime_error("plot: no metrics files given");
  // group by filename with a trailing _seed<k> stripped
  std::map<std::string, std::vector<std::vector<double>>> groups;
  const std::regex seed_re("_seed[0-9]+");
  for (const auto& f : metrics_files) {
    auto data = parse_metrics_csv(f);
    if (!data.count(column))
      throw std::runtime_error("metrics file lacks column " + column + ": " + f);
    std::string stem = std::filesystem::path(f).stem().string();
    stem = std::regex_replace(stem, seed_re, "");
    groups[stem].push_back(data[column]);
  }

  const double W = 860, H = 520, ml = 70, mr = 180, mt = 50, mb = 50;
  double xmax = 1, ymin = 0, ymax = 1e-12;
  std::map<std::string, Band> bands;
  for (auto& [name, series] : groups) {
    Band b = band_of(series);
    xmax = std::max(xmax, static_cast<double>(b.mean.size()));
    for (std::size_t t = 0; t < b.mean.size(); ++t) {
      ymin = std::min(ymin, b.lo[t]);
      ymax = std::max(ymax, b.hi[t]);
    }
    bands[name] = std::move(b);
  }
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto X = [&](double it) { return ml + (W - ml - mr) * it / xmax; };
  auto Y = [&](double v) {
    return H - mb - (H - mb - mt) * (v - ymin) / (ymax - ymin);
  };

  std::filesystem::path p(out_svg);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(out_svg);
  if (!out) throw std::runtime_error("cannot write svg: " + out_svg);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
      << "' height='" << H << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>"
      << title << "</text>\n";
  // axes
  out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
      << "' y2='" << H - mb << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << H - mb << "' stroke='black'/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = ymin + (ymax - ymin) * k / 4.0;
    out << "<text x='" << ml - 8 << "' y='" << Y(v) + 4
        << "' text-anchor='end' font-size='11'>" << std::round(v * 100) / 100
        << "</text>\n";
    const double it = xmax * k / 4.0;
    out << "<text x='" << X(it) << "' y='" << H - mb + 18
        << "' text-anchor='middle' font-size='11'>" << std::lround(it)
        << "</text>\n";
  }
  int ci = 0;
  double legend_y = mt + 10;
  for (const auto& [name, b] : bands) {
    const char* color = kColors[ci % 8];
    if (b.mean.size() > 1) {
      std::ostringstream poly;
      for (std::size_t t = 0; t < b.mean.size(); ++t)
        poly << X(static_cast<double>(t)) << "," << Y(b.hi[t]) << " ";
      for (std::size_t t = b.mean.size(); t-- > 0;)
        poly << X(static_cast<double>(t)) << "," << Y(b.lo[t]) << " ";
      out << "<polygon points='" << poly.str() << "' fill='" << color
          << "' opacity='0.15'/>\n";
      std::ostringstream line;
      for (std::size_t t = 0; t < b.mean.size(); ++t)
        line << X(static_cast<double>(t)) << "," << Y(b.mean[t]) << " ";
      out << "<polyline points='" << line.str() << "' fill='none' stroke='"
          << color << "' stroke-width='1.5'/>\n";
    }
    out << "<rect x='" << W - mr + 10 << "' y='" << legend_y - 9
        << "' width='12' height='12' fill='" << color << "'/>\n";
    out << "<text x='" << W - mr + 28 << "' y='" << legend_y + 2
        << "' font-size='12'>" << name << "</text>\n";
    legend_y += 20;
    ci += 1;
  }
  out << "<text x='" << W / 2 << "' y='" << H - 12
      << "' text-anchor='middle' font-size='12'>iteration</text>\n";
  out << "</svg>\n";
}

}  // namespace sdax
