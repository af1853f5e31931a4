#include "mafd/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mafd/errors.hpp"
#include "text_util.hpp"

namespace mafd {

namespace fs = std::filesystem;

int CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError(source + ": missing column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

double CsvTable::number(std::size_t row, int col) const {
  const std::string& cell = rows.at(row).at(col);
  auto v = text::to_double(cell);
  if (!v) throw ConfigError(source + ": row " + std::to_string(row + 2) + ": '" + cell + "' is not a number");
  return *v;
}

CsvTable parse_csv(const std::string& content, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = text::split(line, ',');
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) + " fields");
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw ConfigError(source + ": empty file");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Ticks at 1, 2 or 5 times a power of ten covering [lo, hi].
std::vector<double> nice_ticks(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.5;
    lo -= pad;
    hi += pad;
  }
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (raw <= step) break;
  }
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;
  std::vector<double> ticks;
  for (int i = 0;; ++i) {
    const double t = lo + i * step;
    if (t > hi + 1e-9 * step) break;
    ticks.push_back(t);
  }
  return ticks;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const Series& s : chart.series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  if (!std::isfinite(xlo)) {
    xlo = ylo = 0.0;
    xhi = yhi = 1.0;
  }
  const std::vector<double> xt = nice_ticks(xlo, xhi);
  const std::vector<double> yt = nice_ticks(ylo, yhi);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ylo) / (yhi - ylo) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(kWidth) << "\" height=\"" << f2(kHeight)
    << "\" viewBox=\"0 0 " << f2(kWidth) << ' ' << f2(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << f2(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(chart.title)
    << "</text>\n";
  for (double t : xt) {
    o << "<line x1=\"" << f2(px(t)) << "\" y1=\"" << f2(kTop) << "\" x2=\"" << f2(px(t)) << "\" y2=\"" << f2(kTop + ph)
      << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << f2(px(t)) << "\" y=\"" << f2(kTop + ph + 18) << "\" text-anchor=\"middle\">" << tick_label(t)
      << "</text>\n";
  }
  for (double t : yt) {
    o << "<line x1=\"" << f2(kLeft) << "\" y1=\"" << f2(py(t)) << "\" x2=\"" << f2(kLeft + pw) << "\" y2=\"" << f2(py(t))
      << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << f2(kLeft - 6) << "\" y=\"" << f2(py(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t)
      << "</text>\n";
  }
  o << "<rect x=\"" << f2(kLeft) << "\" y=\"" << f2(kTop) << "\" width=\"" << f2(pw) << "\" height=\"" << f2(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << f2(kLeft + pw / 2) << "\" y=\"" << f2(kHeight - 16) << "\" text-anchor=\"middle\">"
    << escape(chart.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << f2(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << f2(kTop + ph / 2) << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const Series& s = chart.series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    std::ostringstream d;
    bool pen_down = false;
    double last_y = 0.0;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        pen_down = false;
        continue;
      }
      if (!pen_down) {
        d << (d.tellp() > 0 ? " " : "") << 'M' << f2(px(x)) << ',' << f2(py(y));
        pen_down = true;
      } else if (s.stepped) {
        d << " L" << f2(px(x)) << ',' << f2(py(last_y)) << " L" << f2(px(x)) << ',' << f2(py(y));
      } else {
        d << " L" << f2(px(x)) << ',' << f2(py(y));
      }
      last_y = y;
    }
    if (d.tellp() > 0) {
      o << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << "/>\n";
    }
    if (s.markers) {
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        o << "<circle cx=\"" << f2(px(x)) << "\" cy=\"" << f2(py(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(i);
    const double lx = kLeft + pw + 12;
    o << "<line x1=\"" << f2(lx) << "\" y1=\"" << f2(ly) << "\" x2=\"" << f2(lx + 24) << "\" y2=\"" << f2(ly)
      << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << "/>\n";
    o << "<text x=\"" << f2(lx + 30) << "\" y=\"" << f2(ly + 4) << "\">" << escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

LineChart convergence_chart(const std::vector<CsvTable>& traces) {
  LineChart chart{"Global best fitness", "iteration", "gbest fitness", {}};
  for (const CsvTable& t : traces) {
    if (t.rows.empty()) throw ConfigError(t.source + ": no rows");
    const int it = t.column("iteration");
    const int fit = t.column("gbest_fitness");
    Series s;
    s.name = fs::path(t.source).stem().string();
    s.stepped = true;
    for (std::size_t r = 0; r < t.rows.size(); ++r) s.points.emplace_back(t.number(r, it), t.number(r, fit));
    chart.series.push_back(std::move(s));
  }
  return chart;
}

namespace {

// Series keyed by "scheme N", in first-appearance order.
std::vector<std::pair<std::string, std::vector<std::size_t>>> group_rows(const CsvTable& t) {
  const int scheme = t.column("scheme");
  const int antennas = t.column("antennas");
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string key = t.rows[r][scheme] + " N=" + t.rows[r][antennas];
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back({key, {}});
    groups[it->second].second.push_back(r);
  }
  return groups;
}

}  // namespace

LineChart tradeoff_chart(const CsvTable& t) {
  if (t.rows.empty()) throw ConfigError(t.source + ": no rows");
  const int ul = t.column("mean_total_ul");
  const int dl = t.column("mean_total_dl");
  t.column("weight_ul");
  LineChart chart{"UL/DL power trade-off", "total UL power T1 (W)", "total DL power T2 (W)", {}};
  for (const auto& [name, rows] : group_rows(t)) {
    Series s;
    s.name = name;
    s.markers = true;
    for (std::size_t r : rows) s.points.emplace_back(t.number(r, ul), t.number(r, dl));
    chart.series.push_back(std::move(s));
  }
  return chart;
}

LineChart si_sweep_chart(const CsvTable& t) {
  if (t.rows.empty()) throw ConfigError(t.source + ": no rows");
  const int rho = t.column("rho_db");
  const int ul = t.column("mean_total_ul");
  const int dl = t.column("mean_total_dl");
  LineChart chart{"Transmit power versus SI loss", "rho (dB)", "power (W)", {}};
  for (const auto& [name, rows] : group_rows(t)) {
    Series su{name + " T1", {}, false, false, true};
    Series sd{name + " T2", {}, true, false, true};
    for (std::size_t r : rows) {
      su.points.emplace_back(t.number(r, rho), t.number(r, ul));
      sd.points.emplace_back(t.number(r, rho), t.number(r, dl));
    }
    chart.series.push_back(std::move(su));
    chart.series.push_back(std::move(sd));
  }
  return chart;
}

std::vector<std::string> emit_plots(const std::string& dir) {
  std::vector<std::string> written;
  auto save = [&](const std::string& name, const LineChart& chart) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << render_svg(chart);
    written.push_back(path.string());
  };

  std::vector<std::string> convergence, single;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.path().extension() != ".csv") continue;
      if (name.rfind("convergence_A", 0) == 0) convergence.push_back(entry.path().string());
      if (name.rfind("single_trace_seed", 0) == 0) single.push_back(entry.path().string());
    }
  }
  std::sort(convergence.begin(), convergence.end());
  std::sort(single.begin(), single.end());
  auto traces = [](const std::vector<std::string>& paths) {
    std::vector<CsvTable> out;
    for (const auto& p : paths) out.push_back(read_csv(p));
    return out;
  };
  if (!convergence.empty()) save("convergence.svg", convergence_chart(traces(convergence)));
  if (!single.empty()) save("single_convergence.svg", convergence_chart(traces(single)));
  const fs::path tradeoff = fs::path(dir) / "tradeoff_mean.csv";
  if (fs::exists(tradeoff)) save("tradeoff.svg", tradeoff_chart(read_csv(tradeoff.string())));
  const fs::path sweep = fs::path(dir) / "si_sweep_mean.csv";
  if (fs::exists(sweep)) save("si_sweep.svg", si_sweep_chart(read_csv(sweep.string())));
  return written;
}

}  // namespace mafd
