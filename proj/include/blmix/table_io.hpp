#pragma once

#include <cstdio>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "blmix/errors.hpp"
#include "blmix/sweep.hpp"

namespace blmix {

namespace detail {

inline std::string format_ratio(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", r);
  return buf;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

}  // namespace detail

// CSV schema: header "ratio,n=50,n=100,..."; cells are nonnegative integers,
// "inf" (structural non-mixing) or "ERR".
inline std::string to_csv(const SweepResult& res) {
  std::string out = "ratio";
  for (std::int64_t n : res.grid.ns) out += ",n=" + std::to_string(n);
  out += "\n";
  for (std::size_t ri = 0; ri < res.grid.ratios.size(); ++ri) {
    out += detail::format_ratio(res.grid.ratios[ri]);
    for (std::size_t ni = 0; ni < res.grid.ns.size(); ++ni) {
      const SweepCell& c = res.cell(ri, ni);
      out += ',';
      switch (c.kind) {
        case SweepCell::Kind::value: out += std::to_string(c.t_mix); break;
        case SweepCell::Kind::inf: out += "inf"; break;
        default: out += "ERR"; break;
      }
    }
    out += "\n";
  }
  return out;
}

struct ParsedSweep {
  std::vector<double> ratios;
  std::vector<std::int64_t> ns;
  std::vector<SweepCell> cells;  // row-major, ratios x ns

  const SweepCell& cell(std::size_t ri, std::size_t ni) const {
    return cells[ri * ns.size() + ni];
  }
};

inline ParsedSweep parse_sweep_csv(std::string_view text) {
  ParsedSweep out;
  auto lines = detail::split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw shape_error("sweep csv: empty");
  const auto header = detail::split(lines[0], ',');
  if (header.empty() || header[0] != "ratio")
    throw shape_error("sweep csv: header must start with 'ratio'");
  for (std::size_t i = 1; i < header.size(); ++i) {
    const std::string_view h = header[i];
    if (h.substr(0, 2) != "n=") throw shape_error("sweep csv: bad column header");
    out.ns.push_back(std::stoll(std::string(h.substr(2))));
  }
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = detail::split(lines[li], ',');
    if (fields.size() != out.ns.size() + 1)
      throw shape_error("sweep csv: row width mismatch");
    out.ratios.push_back(std::stod(std::string(fields[0])));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i] == "inf")
        out.cells.push_back(SweepCell::inf());
      else if (fields[i] == "ERR")
        out.cells.push_back(SweepCell::err("ERR"));
      else
        out.cells.push_back(SweepCell::value(std::stoll(std::string(fields[i]))));
    }
  }
  return out;
}

struct FigurePoint {
  std::int64_t n = 0;
  SweepCell cell;
};

inline std::string to_tsv(const std::vector<FigurePoint>& pts) {
  std::string out = "n\tt_mix\n";
  for (const auto& p : pts) {
    out += std::to_string(p.n);
    out += '\t';
    switch (p.cell.kind) {
      case SweepCell::Kind::value: out += std::to_string(p.cell.t_mix); break;
      case SweepCell::Kind::inf: out += "inf"; break;
      default: out += "ERR"; break;
    }
    out += '\n';
  }
  return out;
}

// Self-contained scatter/line plot; finite cells only.
inline std::string figure_svg(const std::vector<FigurePoint>& pts,
                              const std::string& title) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : pts)
    if (p.cell.kind == SweepCell::Kind::value)
      xy.emplace_back(static_cast<double>(p.n), static_cast<double>(p.cell.t_mix));

  const int W = 640, H = 440, ML = 60, MR = 20, MT = 40, MB = 50;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!xy.empty()) {
    xmin = xmax = xy[0].first;
    ymin = 0.0;
    ymax = xy[0].second;
    for (auto& q : xy) {
      xmin = std::min(xmin, q.first);
      xmax = std::max(xmax, q.first);
      ymax = std::max(ymax, q.second);
    }
    if (xmax == xmin) xmax = xmin + 1;
    ymax = ymax * 1.1 + 1;
  }
  auto sx = [&](double x) {
    return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
  };
  auto sy = [&](double y) {
    return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
  };
  char buf[256];
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" "
         "viewBox=\"0 0 640 440\">\n";
  svg += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">%s</text>\n",
                ML, title.c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ML,
                H - MB, W - MR, H - MB);
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ML,
                MT, ML, H - MB);
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                "text-anchor=\"middle\">n</text>\n",
                (ML + W - MR) / 2, H - 12);
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                "transform=\"rotate(-90 16 %d)\">t_mix</text>\n",
                (MT + H - MB) / 2, (MT + H - MB) / 2);
  svg += buf;
  if (!xy.empty()) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"middle\">%.0f</text>\n",
                  ML, H - MB + 16, xmin);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"middle\">%.0f</text>\n",
                  W - MR, H - MB + 16, xmax);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\" "
                  "text-anchor=\"end\">%.0f</text>\n",
                  ML - 6, MT + 12, ymax);
    svg += buf;
    svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xy.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", sx(xy[i].first),
                    sy(xy[i].second));
      svg += buf;
    }
    svg += "\"/>\n";
    for (auto& q : xy) {
      std::snprintf(buf, sizeof buf,
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"steelblue\"/>\n",
                    sx(q.first), sy(q.second));
      svg += buf;
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace blmix
