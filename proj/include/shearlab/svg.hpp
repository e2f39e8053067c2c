#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "shearlab/error.hpp"

namespace shearlab::svg {

struct LineFit {
  double exponent = 0.0;
  double log_coefficient = 0.0;
};

namespace detail {

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

/// Comments may not contain "--".
inline std::string comment_safe(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '-' && !out.empty() && out.back() == '-') {
      out += "\\u002d";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Log-log scatter plot of (x, y) with positive coordinates, optional fitted
/// line y = exp(log_coefficient) x^exponent, and a leading comment.
inline std::string loglog_plot(const std::vector<double>& x, const std::vector<double>& y,
                               const std::optional<LineFit>& fit, const std::string& title,
                               const std::string& comment) {
  if (x.size() != y.size()) throw ValidationError("plot data size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log10(x[i]));
      ly.push_back(std::log10(y[i]));
    }
  }
  const double w = 640, h = 480, left = 70, right = 20, top = 40, bottom = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!lx.empty()) {
    x0 = std::floor(*std::min_element(lx.begin(), lx.end()));
    x1 = std::ceil(*std::max_element(lx.begin(), lx.end()));
    y0 = std::floor(*std::min_element(ly.begin(), ly.end()));
    y1 = std::ceil(*std::max_element(ly.begin(), ly.end()));
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
  }
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double v) { return h - bottom - (v - y0) / (y1 - y0) * (h - top - bottom); };
  using detail::fixed;
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<!-- config: " + detail::comment_safe(comment) + " -->\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
       detail::escape(title) + "</text>\n";
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(h - bottom) + "\" x2=\"" + fixed(w - right) +
       "\" y2=\"" + fixed(h - bottom) + "\"/>\n";
  s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(left) + "\" y2=\"" +
       fixed(h - bottom) + "\"/>\n";
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = static_cast<int>(x0); k <= static_cast<int>(x1); ++k) {
    s += "<text x=\"" + fixed(px(k)) + "\" y=\"" + fixed(h - bottom + 16) +
         "\" text-anchor=\"middle\">1e" + std::to_string(k) + "</text>\n";
  }
  for (int k = static_cast<int>(y0); k <= static_cast<int>(y1); ++k) {
    s += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(py(k) + 4) +
         "\" text-anchor=\"end\">1e" + std::to_string(k) + "</text>\n";
  }
  s += "<text x=\"" + fixed((left + w - right) / 2) + "\" y=\"" + fixed(h - 16) +
       "\" text-anchor=\"middle\">L</text>\n";
  s += "<text x=\"16\" y=\"" + fixed((top + h - bottom) / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + fixed((top + h - bottom) / 2) +
       ")\">count</text>\n</g>\n";
  s += "<g fill=\"steelblue\">\n";
  for (std::size_t i = 0; i < lx.size(); ++i) {
    s += "<circle cx=\"" + fixed(px(lx[i])) + "\" cy=\"" + fixed(py(ly[i])) + "\" r=\"3\"/>\n";
  }
  s += "</g>\n";
  if (fit && !lx.empty()) {
    const double ln10 = std::log(10.0);
    auto line_y = [&](double lxv) { return fit->exponent * lxv + fit->log_coefficient / ln10; };
    const double a = std::clamp(line_y(x0), y0, y1), b = std::clamp(line_y(x1), y0, y1);
    const double xa = fit->exponent != 0.0 ? (a - fit->log_coefficient / ln10) / fit->exponent : x0;
    const double xb = fit->exponent != 0.0 ? (b - fit->log_coefficient / ln10) / fit->exponent : x1;
    s += "<line x1=\"" + fixed(px(xa)) + "\" y1=\"" + fixed(py(a)) + "\" x2=\"" + fixed(px(xb)) +
         "\" y2=\"" + fixed(py(b)) + "\" stroke=\"firebrick\" stroke-width=\"1.5\"/>\n";
    s += "<text x=\"" + fixed(w - right - 4) + "\" y=\"" + fixed(top + 14) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"firebrick\">slope " +
         fixed(fit->exponent, 3) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace shearlab::svg
