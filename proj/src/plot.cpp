#include "netrecon/plot.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "netrecon/error.hpp"

namespace netrecon {

namespace {

constexpr const char* kStage = "plot";
constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 150.0, kTop = 40.0, kBottom = 55.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

// Round tick spacing covering [lo, hi] with about `count` steps.
std::vector<double> ticks(double lo, double hi, int count) {
  const double raw = (hi - lo) / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0})
    if (f * mag >= raw) {
      step = f * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

struct Point {
  double x, y, spread;
};

}  // namespace

int CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(kStage, "no column '" + std::string(name) + "'");
  return static_cast<int>(it - header.begin());
}

double CsvTable::number(std::size_t row, int col) const {
  const std::string& s = rows.at(row).at(static_cast<std::size_t>(col));
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw Error(kStage, "not a number: '" + s + "'");
  }
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  auto fields = [](const std::string& l) {
    std::vector<std::string> out;
    std::string f;
    std::istringstream ls(l);
    while (std::getline(ls, f, ',')) out.push_back(f);
    return out;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (table.header.empty()) {
      table.header = fields(line);
      continue;
    }
    auto row = fields(line);
    if (row.size() != table.header.size()) throw Error(kStage, "ragged csv row: " + line);
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw Error(kStage, "csv has no header");
  return table;
}

std::string line_chart_svg(const CsvTable& table, const LinePlotSpec& spec) {
  const int xc = table.column(spec.x_column);
  const int yc = table.column(spec.y_column);
  const int sc = spec.std_column.empty() ? -1 : table.column(spec.std_column);
  const int gc = spec.group_column.empty() ? -1 : table.column(spec.group_column);

  std::map<std::string, std::vector<Point>> groups;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string key = gc >= 0 ? table.rows[r][gc] : spec.y_column;
    double x = table.number(r, xc);
    if (spec.log_x) {
      if (x <= 0.0) continue;
      x = std::log10(x);
    }
    groups[key].push_back({x, table.number(r, yc), sc >= 0 ? table.number(r, sc) : 0.0});
  }
  if (groups.empty()) throw Error(kStage, "nothing to plot");

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (auto& [key, pts] : groups) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y - p.spread);
      y1 = std::max(y1, p.y + p.spread);
    }
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
  if (y1 - y0 < 1e-12) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(spec.title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(x0, x1, 6)) {
    svg << "<line x1=\"" << sx(t) << "\" y1=\"" << kTop + ph << "\" x2=\"" << sx(t) << "\" y2=\""
        << kTop + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << sx(t) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
        << (spec.log_x ? "1e" + fmt(t) : fmt(t)) << "</text>\n";
  }
  for (double t : ticks(y0, y1, 5)) {
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(t) << "\" x2=\"" << kLeft + pw
        << "\" y2=\"" << sy(t) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(t) + 4 << "\" text-anchor=\"end\">" << fmt(t)
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(spec.x_label.empty() ? spec.x_column : spec.x_label)
      << "</text>\n";
  svg << "<text transform=\"translate(18," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(spec.y_label.empty() ? spec.y_column : spec.y_label) << "</text>\n";

  int color = 0;
  for (const auto& [key, pts] : groups) {
    const char* c = kPalette[color % std::size(kPalette)];
    if (sc >= 0) {
      svg << "<polygon fill=\"" << c << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
      for (const auto& p : pts) svg << sx(p.x) << ',' << sy(p.y + p.spread) << ' ';
      for (auto it = pts.rbegin(); it != pts.rend(); ++it)
        svg << sx(it->x) << ',' << sy(it->y - it->spread) << ' ';
      svg << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : pts) svg << sx(p.x) << ',' << sy(p.y) << ' ';
    svg << "\"/>\n";
    for (const auto& p : pts)
      svg << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"3\" fill=\"" << c
          << "\"/>\n";
    const double ly = kTop + 14 + 20 * color;
    svg << "<line x1=\"" << kLeft + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + pw + 46 << "\" y=\"" << ly + 4 << "\">" << escape(key)
        << "</text>\n";
    ++color;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string network_svg(const Network& truth, const Network& recovered, const std::string& title) {
  if (truth.size() != recovered.size()) throw Error(kStage, "networks differ in size");
  const int n = truth.size();
  const double cx = 200.0, cy = 215.0, radius = 150.0, node_r = 13.0;
  std::vector<double> px(n), py(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n - std::numbers::pi / 2.0;
    px[i] = cx + radius * std::cos(a);
    py[i] = cy + radius * std::sin(a);
  }

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<defs>";
  for (const auto& [id, color] : {std::pair{"ok", "black"}, {"bad", "#d62728"}, {"miss", "#888888"}})
    svg << "<marker id=\"" << id << "\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" "
           "markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">"
           "<path d=\"M0,0 L10,5 L0,10 z\" fill=\"" << color << "\"/></marker>";
  svg << "</defs>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"200\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";

  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < n; ++s) {
      const bool in_truth = truth.influences(t, s), found = recovered.influences(t, s);
      if (!in_truth && !found) continue;
      // Edge from source s to target t, trimmed to the node circles and bent
      // slightly so that opposite directions do not overlap.
      const double dx = px[t] - px[s], dy = py[t] - py[s];
      const double len = std::hypot(dx, dy);
      const double ux = dx / len, uy = dy / len;
      const double x1 = px[s] + ux * node_r, y1 = py[s] + uy * node_r;
      const double x2 = px[t] - ux * node_r, y2 = py[t] - uy * node_r;
      const double mx = (x1 + x2) / 2 - uy * 12, my = (y1 + y2) / 2 + ux * 12;
      const char* style = in_truth && found
                              ? "stroke=\"black\" stroke-width=\"1.6\" marker-end=\"url(#ok)\""
                          : found ? "stroke=\"#d62728\" stroke-width=\"0.8\" marker-end=\"url(#bad)\""
                                  : "stroke=\"#888888\" stroke-width=\"1.2\" stroke-dasharray=\"3,3\" "
                                    "marker-end=\"url(#miss)\"";
      svg << "<path d=\"M" << x1 << ',' << y1 << " Q" << mx << ',' << my << ' ' << x2 << ',' << y2
          << "\" fill=\"none\" " << style << "/>\n";
    }
  }
  for (int i = 0; i < n; ++i) {
    svg << "<circle cx=\"" << px[i] << "\" cy=\"" << py[i] << "\" r=\"" << node_r
        << "\" fill=\"#f0f0f0\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px[i] << "\" y=\"" << py[i] + 4 << "\" text-anchor=\"middle\">" << i + 1
        << "</text>\n";
  }
  const RecoveryScore score = compare(truth, recovered);
  svg << "<text x=\"200\" y=\"392\" text-anchor=\"middle\">spurious " << score.false_positives
      << ", missing " << score.false_negatives << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace netrecon
