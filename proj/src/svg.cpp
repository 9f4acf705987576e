#include "warplab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace warplab::svg {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    return (a - lo) / (hi - lo);
  }
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int a = static_cast<int>(std::ceil(lo - 1e-9)), b = static_cast<int>(std::floor(hi + 1e-9));
      const int stride = std::max(1, (b - a) / 8 + 1);
      for (int e = a; e <= b; e += stride) out.push_back(std::pow(10.0, e));
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
      out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return out;
  }
};

Axis make_axis(std::vector<double> v, bool log) {
  Axis a;
  a.log = log;
  if (log) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !(x > 0.0) || !std::isfinite(x); }), v.end());
    for (double& x : v) x = std::log10(x);
  } else {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  }
  if (v.empty()) return a;
  a.lo = *std::min_element(v.begin(), v.end());
  a.hi = *std::max_element(v.begin(), v.end());
  if (a.hi - a.lo < 1e-12 * std::max(1.0, std::abs(a.hi))) {
    a.lo -= 0.5;
    a.hi += 0.5;
  } else if (!log) {
    const double pad = 0.05 * (a.hi - a.lo);
    a.lo -= pad;
    a.hi += pad;
  } else {
    a.lo = std::floor(a.lo);
    a.hi = std::ceil(a.hi);
  }
  return a;
}

}  // namespace

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

std::string render(const LineChart& chart) {
  const double W = chart.width, H = chart.height;
  const double left = 80, right = 170, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  std::vector<double> xs, ys;
  for (const auto& s : chart.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  for (const auto& h : chart.hlines) ys.push_back(h.second);
  const Axis ax = make_axis(xs, chart.log_x), ay = make_axis(ys, chart.log_y);
  auto X = [&](double v) { return left + pw * ax.map(v); };
  auto Y = [&](double v) { return top + ph * (1.0 - ay.map(v)); };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!chart.log_x || x > 0.0) && (!chart.log_y || y > 0.0);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
     << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(chart.title)
     << "</text>\n";

  os << "<g stroke=\"#e0e0e0\">\n";
  for (double t : ax.ticks())
    os << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(top) << "\" x2=\"" << num(X(t)) << "\" y2=\""
       << num(top + ph) << "\"/>\n";
  for (double t : ay.ticks())
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
       << num(Y(t)) << "\"/>\n";
  os << "</g>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks())
    os << "<text x=\"" << num(X(t)) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
       << tick_label(t) << "</text>\n";
  for (double t : ay.ticks())
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(Y(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t)
       << "</text>\n";
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 18) << "\" text-anchor=\"middle\">"
     << escape(chart.x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(chart.y_label) << "</text>\n";

  for (const auto& [name, v] : chart.hlines) {
    if (chart.log_y && !(v > 0.0)) continue;
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(Y(v)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
       << num(Y(v)) << "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";
    os << "<text x=\"" << num(left + pw - 4) << "\" y=\"" << num(Y(v) - 4) << "\" text-anchor=\"end\">"
       << escape(name) << "</text>\n";
  }

  std::size_t idx = 0;
  for (const auto& s : chart.series) {
    const char* color = kPalette[idx % (sizeof kPalette / sizeof *kPalette)];
    std::ostringstream path;
    bool pen = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) {
        pen = false;
        continue;
      }
      path << (pen ? " L" : (path.tellp() > 0 ? " M" : "M")) << num(X(s.x[i])) << ',' << num(Y(s.y[i]));
      pen = true;
    }
    os << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (usable(s.x[i], s.y[i]))
          os << "<circle cx=\"" << num(X(s.x[i])) << "\" cy=\"" << num(Y(s.y[i])) << "\" r=\"2.5\" fill=\"" << color
             << "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(idx);
    os << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 32)
       << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(left + pw + 38) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.name) << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace warplab::svg
