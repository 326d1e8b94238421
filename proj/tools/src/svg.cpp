#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace policybound {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* sign_color(SignClass sign) {
  switch (sign) {
    case SignClass::strictly_positive:
      return "#2e7d32";
    case SignClass::strictly_negative:
      return "#c62828";
    case SignClass::indeterminate:
      return "#9e9e9e";
  }
  return "#9e9e9e";
}

}  // namespace

std::string bounds_svg(const std::vector<BoundResult>& bounds,
                       const std::vector<std::vector<BoundResult>>& z_dots) {
  const double left = 70.0;
  const double right = 20.0;
  const double top = 30.0;
  const double row_h = 16.0;
  const double plot_w = 720.0;
  const double width = left + plot_w + right;
  const double height = top + row_h * bounds.size() + 30.0;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& b : bounds) {
    lo = std::min(lo, b.lo);
    hi = std::max(hi, b.hi);
  }
  for (const auto& grid : z_dots) {
    for (const auto& b : grid) {
      lo = std::min(lo, b.lo);
      hi = std::max(hi, b.hi);
    }
  }
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);
  const double pad = 0.05 * (hi - lo + 1e-12);
  lo -= pad;
  hi += pad;
  auto sx = [&](double v) { return left + plot_w * (v - lo) / (hi - lo); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + num(sx(0.0)) + "\" y1=\"" + num(top - 10.0) +
         "\" x2=\"" + num(sx(0.0)) + "\" y2=\"" +
         num(top + row_h * bounds.size()) +
         "\" stroke=\"#444444\" stroke-dasharray=\"4 3\"/>\n";

  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const BoundResult& b = bounds[i];
    const double y = top + row_h * i + row_h / 2.0;
    svg += "<text x=\"" + num(left - 8.0) + "\" y=\"" + num(y + 3.5) +
           "\" text-anchor=\"end\" font-size=\"10\">" + b.unit + "</text>\n";
    svg += "<line x1=\"" + num(sx(b.lo)) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(sx(b.hi)) + "\" y2=\"" + num(y) + "\" stroke=\"" +
           sign_color(b.sign) + "\" stroke-width=\"5\"/>\n";
    for (const auto& grid : z_dots) {
      const BoundResult& dot = grid[i];
      svg += "<circle cx=\"" + num(sx(dot.lo)) + "\" cy=\"" + num(y) +
             "\" r=\"2\" fill=\"#222222\"/>\n";
      svg += "<circle cx=\"" + num(sx(dot.hi)) + "\" cy=\"" + num(y) +
             "\" r=\"2\" fill=\"#222222\"/>\n";
    }
  }

  // Axis labels at the extremes and zero.
  const double axis_y = top + row_h * bounds.size() + 16.0;
  for (double v : {lo + pad, 0.0, hi - pad}) {
    svg += "<text x=\"" + num(sx(v)) + "\" y=\"" + num(axis_y) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + num(v) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string illustration_svg(const IllustrationBundle& bundle) {
  const double left = 50.0;
  const double top = 20.0;
  const double plot_w = 640.0;
  const double plot_h = 420.0;
  const double width = left + plot_w + 20.0;
  const double height = top + plot_h + 40.0;

  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
  for (const auto& u : bundle.dataset.latent) {
    y_lo = std::min(y_lo, u.true_ite);
    y_hi = std::max(y_hi, u.true_ite);
  }
  const double x_lo = bundle.grid.front().x;
  const double x_hi = bundle.grid.back().x;
  auto sx = [&](double v) { return left + plot_w * (v - x_lo) / (x_hi - x_lo); };
  auto sy = [&](double v) {
    return top + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo));
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& u : bundle.dataset.latent) {
    if (u.x < x_lo || u.x > x_hi) {
      continue;
    }
    svg += "<circle cx=\"" + num(sx(u.x)) + "\" cy=\"" + num(sy(u.true_ite)) +
           "\" r=\"1.5\" fill=\"" +
           (u.m_if_treated == 2 ? std::string("#ef9a9a") :
                                  std::string("#90caf9")) +
           "\" fill-opacity=\"0.6\"/>\n";
  }

  struct Curve {
    double IllustrationBundle::GridRow::* field;
    const char* color;
    const char* dash;
  };
  const Curve curves[] = {
      {&IllustrationBundle::GridRow::cate_v1, "#1565c0", ""},
      {&IllustrationBundle::GridRow::cate_v2, "#b71c1c", ""},
      {&IllustrationBundle::GridRow::coarsened_cate, "#2e7d32", ""},
      {&IllustrationBundle::GridRow::projection, "#424242", "6 4"},
  };
  for (const Curve& curve : curves) {
    std::string points;
    for (const auto& row : bundle.grid) {
      const double y = row.*curve.field;
      if (y < y_lo || y > y_hi) {
        continue;
      }
      points += num(sx(row.x)) + "," + num(sy(y)) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(curve.color) +
           "\" stroke-width=\"2\"" +
           (curve.dash[0] ? " stroke-dasharray=\"" + std::string(curve.dash) +
                                "\""
                          : std::string()) +
           " points=\"" + points + "\"/>\n";
  }

  svg += "<text x=\"" + num(left + plot_w / 2.0) + "\" y=\"" +
         num(height - 8.0) +
         "\" text-anchor=\"middle\" font-size=\"11\">x</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace policybound
