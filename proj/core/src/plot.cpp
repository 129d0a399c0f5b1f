#include "lipgan/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lipgan/config.hpp"
#include "lipgan/errors.hpp"

namespace lipgan {

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

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

std::string axis_title(SweepAxis a) {
  switch (a) {
    case SweepAxis::NTrain: return "number of training samples n";
    case SweepAxis::GenWidth: return "generator width W_g";
    case SweepAxis::GenDepth: return "generator depth D_g";
    case SweepAxis::DiscWidth: return "discriminator width W_f";
    case SweepAxis::DiscDepth: return "discriminator depth D_f";
  }
  return "";
}

}  // namespace

std::string render_curves_svg(const std::vector<SweepResult>& results, const PlotOptions& opt) {
  bool any = false;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& r : results)
    for (const auto& p : r.points) {
      if (p.count == 0) continue;
      any = true;
      xmin = std::min(xmin, p.axis_value);
      xmax = std::max(xmax, p.axis_value);
      ymin = std::min(ymin, p.mean - p.stderr_);
      ymax = std::max(ymax, p.mean + p.stderr_);
    }
  if (!any) throw ConfigError("plot: nothing to plot");
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  ymin = std::min(ymin, 0.0);
  if (ymax <= ymin) ymax = ymin + 1.0;
  ymax += 0.05 * (ymax - ymin);

  const double left = 70, right = 150, top = 40, bottom = 60;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
    << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    s << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(opt.title) << "</text>\n";
  }
  // frame and ticks
  s << "<g stroke=\"black\" fill=\"none\">\n";
  s << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(left + pw) << "\" y2=\""
    << num(top + ph) << "\"/>\n";
  s << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
    << num(top + ph) << "\"/>\n";
  s << "</g>\n<g font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    s << "<line x1=\"" << num(sx(xv)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(sx(xv)) << "\" y2=\""
      << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(xv) << "</text>\n";
    s << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(sy(yv)) << "\" x2=\"" << num(left) << "\" y2=\""
      << num(sy(yv)) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">"
      << tick_label(yv) << "</text>\n";
  }
  s << "</g>\n";
  const SweepAxis axis = results.front().axis;
  s << "<text class=\"xlabel\" x=\"" << num(left + pw / 2) << "\" y=\"" << num(opt.height - 15)
    << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(axis_title(axis)) << "</text>\n";
  s << "<text class=\"ylabel\" x=\"18\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\""
    << " transform=\"rotate(-90 18 " << num(top + ph / 2) << ")\">" << escape(opt.y_label) << "</text>\n";

  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    const char* color = kColors[k % std::size(kColors)];
    s << "<g class=\"series\" stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    std::ostringstream pts;
    for (const auto& p : r.points) {
      if (p.count == 0) continue;
      pts << (pts.tellp() > 0 ? " " : "") << num(sx(p.axis_value)) << ',' << num(sy(p.mean));
    }
    s << "<polyline class=\"curve\" fill=\"none\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    for (const auto& p : r.points) {
      if (p.count == 0) continue;
      const double x = sx(p.axis_value);
      s << "<line class=\"errbar\" x1=\"" << num(x) << "\" y1=\"" << num(sy(p.mean - p.stderr_)) << "\" x2=\""
        << num(x) << "\" y2=\"" << num(sy(p.mean + p.stderr_)) << "\"/>\n";
      s << "<circle class=\"marker\" cx=\"" << num(x) << "\" cy=\"" << num(sy(p.mean)) << "\" r=\"3.5\"/>\n";
    }
    s << "</g>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(k);
    s << "<g class=\"legend\"><rect x=\"" << num(left + pw + 15) << "\" y=\"" << num(ly - 5)
      << "\" width=\"14\" height=\"4\" fill=\"" << color << "\"/><text x=\"" << num(left + pw + 34) << "\" y=\""
      << num(ly) << "\" font-size=\"11\">" << escape(r.label) << "</text></g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void plot_curves(const std::vector<SweepResult>& results, const std::filesystem::path& out,
                 const PlotOptions& options) {
  if (results.empty()) throw ConfigError("plot: no results");
  write_text_file(out, render_curves_svg(results, options));
}

void plot_curves(const SweepResult& result, const std::filesystem::path& out, const PlotOptions& options) {
  plot_curves(std::vector<SweepResult>{result}, out, options);
}

}  // namespace lipgan
