#include "capsd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace capsd {

Association associate(std::span<const TimedPosition> estimates, std::span<const TimedPosition> truth, double window) {
  Association out;
  if (truth.empty()) {
    throw EmptyOverlap("EmptyOverlap: no ground truth samples");
  }
  const double t0 = truth.front().t;
  const double t1 = truth.back().t;
  for (const TimedPosition& e : estimates) {
    if (e.t < t0) {
      if (t0 - e.t <= window) {
        out.pairs.push_back({e.t, e.p, truth.front().p});
      } else {
        ++out.dropped;
      }
      continue;
    }
    if (e.t > t1) {
      if (e.t - t1 <= window) {
        out.pairs.push_back({e.t, e.p, truth.back().p});
      } else {
        ++out.dropped;
      }
      continue;
    }
    auto hi = std::lower_bound(truth.begin(), truth.end(), e.t,
                               [](const TimedPosition& a, double t) { return a.t < t; });
    if (hi->t == e.t) {
      out.pairs.push_back({e.t, e.p, hi->p});
      continue;
    }
    auto lo = hi - 1;
    const double s = (e.t - lo->t) / (hi->t - lo->t);
    out.pairs.push_back({e.t, e.p, lo->p + s * (hi->p - lo->p)});
  }
  if (out.pairs.empty()) {
    throw EmptyOverlap("EmptyOverlap: no estimate falls within " + std::to_string(window) + " s of ground truth");
  }
  return out;
}

MetricsReport computeMetrics(std::span<const PairedSample> pairs, int bins) {
  if (pairs.empty()) throw EmptyInput("EmptyInput: no paired samples");
  if (bins < 1) throw std::invalid_argument("computeMetrics: bins must be >= 1");
  MetricsReport r;
  r.count = pairs.size();
  Vec3 sq = Vec3::Zero();
  double norm_sum = 0.0;
  double amax = 0.0;
  for (const PairedSample& s : pairs) {
    const Vec3 e = s.estimate - s.truth;
    sq += e.cwiseAbs2();
    r.mean_error += e;
    const double n = e.norm();
    norm_sum += n;
    r.max_error = std::max(r.max_error, n);
    amax = std::max(amax, e.cwiseAbs().maxCoeff());
  }
  const double n = static_cast<double>(pairs.size());
  r.rmse = (sq / n).cwiseSqrt();
  r.mean_error /= n;
  r.med = norm_sum / n;

  // symmetric range so zero sits on a bin edge (even bins) or centre (odd)
  Histogram& h = r.histogram;
  const double half = amax > 0.0 ? amax : 1e-3;
  h.lo = -half;
  h.hi = half;
  h.x.assign(bins, 0);
  h.y.assign(bins, 0);
  h.z.assign(bins, 0);
  auto bin = [&](double v) {
    int k = static_cast<int>(std::floor((v - h.lo) / (h.hi - h.lo) * bins));
    return std::clamp(k, 0, bins - 1);
  };
  for (const PairedSample& s : pairs) {
    const Vec3 e = s.estimate - s.truth;
    ++h.x[bin(e.x())];
    ++h.y[bin(e.y())];
    ++h.z[bin(e.z())];
  }
  return r;
}

std::string formatReport(const MetricsReport& r) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "samples      %zu (dropped %zu)\n", r.count, r.dropped);
  os << buf;
  std::snprintf(buf, sizeof buf, "RMSE x/y/z   %.3f %.3f %.3f m\n", r.rmse.x(), r.rmse.y(), r.rmse.z());
  os << buf;
  std::snprintf(buf, sizeof buf, "mean error   %.3f %.3f %.3f m\n", r.mean_error.x(), r.mean_error.y(),
                r.mean_error.z());
  os << buf;
  std::snprintf(buf, sizeof buf, "MED          %.3f m\n", r.med);
  os << buf;
  std::snprintf(buf, sizeof buf, "max error    %.3f m\n", r.max_error);
  os << buf;
  if (!r.error_counts.empty()) {
    os << "solver errors\n";
    for (const auto& [code, n] : r.error_counts) {
      std::snprintf(buf, sizeof buf, "  %-20s %d\n", code.c_str(), n);
      os << buf;
    }
  }
  return os.str();
}

nlohmann::json reportToJson(const MetricsReport& r) {
  nlohmann::json j;
  j["count"] = r.count;
  j["dropped"] = r.dropped;
  j["error_counts"] = r.error_counts;
  if (r.count > 0) {
    j["rmse"] = {r.rmse.x(), r.rmse.y(), r.rmse.z()};
    j["mean_error"] = {r.mean_error.x(), r.mean_error.y(), r.mean_error.z()};
    j["med"] = r.med;
    j["max_error"] = r.max_error;
    j["histogram"] = {{"lo", r.histogram.lo},
                      {"hi", r.histogram.hi},
                      {"x", r.histogram.x},
                      {"y", r.histogram.y},
                      {"z", r.histogram.z}};
  }
  return j;
}

}  // namespace capsd
