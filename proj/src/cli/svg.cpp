#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "resforge/cli/cli.hpp"

namespace resforge::cli {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr int kLegendRows = 12;

std::string label(const model::MultiIndex& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
  return s + ")";
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<lattice::ResonanceRecord>& records, const SvgOptions& opt) {
  const double W = opt.width, H = opt.height;
  const double left = 70, right = 150, top = 40, bottom = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  std::map<model::MultiIndex, int> colour;
  for (const auto& r : records) {
    xmin = std::min(xmin, r.lambda_series.real());
    xmax = std::max(xmax, r.lambda_series.real());
    ymin = std::min(ymin, r.lambda_series.imag());
    ymax = std::max(ymax, r.lambda_series.imag());
    colour.emplace(r.alpha, 0);
  }
  if (records.empty()) xmin = ymin = 0.0, xmax = ymax = 1.0;
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  int next = 0;
  for (auto& [a, c] : colour) c = next++;

  const double pw = W - left - right, ph = H - top - bottom;
  auto X = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      opt.width, opt.height, opt.width, opt.height);
  if (!opt.title.empty()) {
    s += fmt::format("<text x=\"{:.2f}\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                     left + pw / 2, escape_xml(opt.title));
  }
  s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                   left, top, pw, ph);
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4, yv = ymin + (ymax - ymin) * i / 4;
    s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", X(xv),
                     top + ph, top + ph + 5);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{:.6g}</text>\n", X(xv),
                     top + ph + 18, xv);
    s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n", left - 5,
                     Y(yv), left);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.6g}</text>\n", left - 8,
                     Y(yv) + 4, yv);
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">Re lambda</text>\n",
                   left + pw / 2, H - 10);
  s += fmt::format(
      "<text x=\"16\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">Im "
      "lambda</text>\n",
      top + ph / 2, top + ph / 2);
  for (const auto& r : records) {
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", X(r.lambda_series.real()),
                     Y(r.lambda_series.imag()), kPalette[colour[r.alpha] % 10]);
  }
  int row = 0;
  for (const auto& [a, c] : colour) {
    const double y = top + 12 + 16 * row;
    if (row == kLegendRows) {
      s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\">... {} more</text>\n", W - right + 15, y + 4,
                       colour.size() - kLegendRows);
      break;
    }
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"{}\"/>\n", W - right + 15, y, kPalette[c % 10]);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\">alpha = {}</text>\n", W - right + 25, y + 4,
                     label(a));
    ++row;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace resforge::cli
