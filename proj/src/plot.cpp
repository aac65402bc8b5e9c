#include "capsd/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace capsd {

namespace {

struct Box {
  double x0, y0, w, h;  // pixel rectangle
  double xmin = std::numeric_limits<double>::infinity(), xmax = -std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity(), ymax = -std::numeric_limits<double>::infinity();

  void fit(double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  void pad() {
    if (!(xmax > xmin)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymax > ymin)) { ymin -= 0.5; ymax += 0.5; }
    const double dx = 0.05 * (xmax - xmin), dy = 0.05 * (ymax - ymin);
    xmin -= dx; xmax += dx; ymin -= dy; ymax += dy;
  }
  // equal metres per pixel on both axes, centred
  void equalAspect() {
    const double sx = (xmax - xmin) / w, sy = (ymax - ymin) / h;
    const double s = std::max(sx, sy);
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    xmin = cx - 0.5 * s * w; xmax = cx + 0.5 * s * w;
    ymin = cy - 0.5 * s * h; ymax = cy + 0.5 * s * h;
  }
  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void frame(std::ostream& os, const Box& b, const std::string& title, const std::string& xlabel) {
  os << "<rect x='" << b.x0 << "' y='" << b.y0 << "' width='" << b.w << "' height='" << b.h
     << "' fill='none' stroke='#444'/>\n";
  os << "<text x='" << b.x0 << "' y='" << b.y0 - 6 << "' font-size='13'>" << title << "</text>\n";
  os << "<text x='" << b.x0 << "' y='" << b.y0 + b.h + 14 << "' font-size='10'>" << num(b.xmin) << "</text>\n";
  os << "<text x='" << b.x0 + b.w << "' y='" << b.y0 + b.h + 14 << "' font-size='10' text-anchor='end'>"
     << num(b.xmax) << "</text>\n";
  os << "<text x='" << b.x0 + 0.5 * b.w << "' y='" << b.y0 + b.h + 14
     << "' font-size='10' text-anchor='middle'>" << xlabel << "</text>\n";
  os << "<text x='" << b.x0 - 4 << "' y='" << b.y0 + 10 << "' font-size='10' text-anchor='end'>" << num(b.ymax)
     << "</text>\n";
  os << "<text x='" << b.x0 - 4 << "' y='" << b.y0 + b.h << "' font-size='10' text-anchor='end'>" << num(b.ymin)
     << "</text>\n";
}

template <class Fx, class Fy, class T>
void polyline(std::ostream& os, const Box& b, const std::vector<T>& pts, Fx fx, Fy fy, const char* color) {
  os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.2' points='";
  for (const T& p : pts) os << b.px(fx(p)) << ',' << b.py(fy(p)) << ' ';
  os << "'/>\n";
}

template <class Fx, class Fy, class T>
void dots(std::ostream& os, const Box& b, const std::vector<T>& pts, Fx fx, Fy fy, const char* color) {
  for (const T& p : pts) {
    os << "<circle cx='" << b.px(fx(p)) << "' cy='" << b.py(fy(p)) << "' r='1.6' fill='" << color << "'/>\n";
  }
}

void save(const std::string& path, int w, int h, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
      << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n"
      << body << "</svg>\n";
}

void legend(std::ostream& os, double x, double y) {
  os << "<line x1='" << x << "' y1='" << y << "' x2='" << x + 18 << "' y2='" << y
     << "' stroke='#1f77b4' stroke-width='2'/><text x='" << x + 22 << "' y='" << y + 4
     << "' font-size='11'>ground truth</text>\n";
  os << "<circle cx='" << x + 9 << "' cy='" << y + 16 << "' r='2.5' fill='#d62728'/><text x='" << x + 22
     << "' y='" << y + 20 << "' font-size='11'>estimate</text>\n";
}

}  // namespace

std::vector<std::string> writePlots(const PipelineResult& estimates, const Dataset& ds, const std::string& dir,
                                    double window) {
  const MetricsReport rep = evaluate(estimates, ds, window);
  const auto est = estimates.positions();
  const auto truth = truthFromDataset(ds);
  std::filesystem::create_directories(dir);
  const std::string base = (std::filesystem::path(dir) / "").string();
  std::vector<std::string> files;

  {
    Box b{60, 40, 620, 440};
    for (const auto& s : truth) b.fit(s.p.x(), s.p.y());
    for (const auto& s : est) b.fit(s.p.x(), s.p.y());
    b.pad();
    b.equalAspect();
    std::ostringstream os;
    frame(os, b, "ROV track, top view (m)", "x");
    auto fx = [](const TimedPosition& s) { return s.p.x(); };
    auto fy = [](const TimedPosition& s) { return s.p.y(); };
    polyline(os, b, truth, fx, fy, "#1f77b4");
    dots(os, b, est, fx, fy, "#d62728");
    legend(os, 560, 60);
    files.push_back(base + "trajectory_xy.svg");
    save(files.back(), 720, 520, os.str());
  }

  {
    std::ostringstream os;
    const char* names[] = {"x (m)", "y (m)", "z (m)"};
    for (int a = 0; a < 3; ++a) {
      Box b{60, 40.0 + a * 200.0, 760, 150};
      for (const auto& s : truth) b.fit(s.t, s.p[a]);
      for (const auto& s : est) b.fit(s.t, s.p[a]);
      b.pad();
      frame(os, b, names[a], "t (s)");
      auto ft = [](const TimedPosition& s) { return s.t; };
      auto fv = [a](const TimedPosition& s) { return s.p[a]; };
      polyline(os, b, truth, ft, fv, "#1f77b4");
      dots(os, b, est, ft, fv, "#d62728");
    }
    legend(os, 700, 12);
    files.push_back(base + "axes.svg");
    save(files.back(), 860, 640, os.str());
  }

  {
    std::ostringstream os;
    const Histogram& h = rep.histogram;
    const std::vector<int>* axes[] = {&h.x, &h.y, &h.z};
    const char* names[] = {"x error (m)", "y error (m)", "z error (m)"};
    for (int a = 0; a < 3; ++a) {
      const auto& counts = *axes[a];
      Box b{60.0 + a * 280.0, 40, 230, 200};
      b.xmin = h.lo;
      b.xmax = h.hi;
      b.ymin = 0;
      b.ymax = std::max(1, *std::max_element(counts.begin(), counts.end()));
      frame(os, b, names[a], "");
      const double bw = (h.hi - h.lo) / counts.size();
      for (size_t k = 0; k < counts.size(); ++k) {
        const double x = h.lo + k * bw;
        os << "<rect x='" << b.px(x) << "' y='" << b.py(counts[k]) << "' width='" << b.px(x + bw) - b.px(x)
           << "' height='" << b.py(0) - b.py(counts[k]) << "' fill='#1f77b4' stroke='white'/>\n";
      }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "MED %.3f m over %zu samples", rep.med, rep.count);
    os << "<text x='60' y='280' font-size='12'>" << buf << "</text>\n";
    files.push_back(base + "histogram.svg");
    save(files.back(), 900, 300, os.str());
  }
  return files;
}

}  // namespace capsd
