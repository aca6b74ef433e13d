#include "sivae/kriging.hpp"

#include "sivae/random_fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sivae {

std::vector<VariogramBin> empirical_variogram(const Matrix& locations, const Vector& values, int bins,
                                              double max_dist) {
  const auto n = locations.rows();
  if (n < 2) throw std::invalid_argument("empirical_variogram: need at least two points");
  if (values.size() != n || locations.cols() != 2) throw std::invalid_argument("empirical_variogram: shape mismatch");
  if (bins < 1 || !(max_dist > 0.0)) throw std::invalid_argument("empirical_variogram: bins and max_dist must be positive");
  const double width = max_dist / bins;
  std::vector<double> lag_sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> sq_sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<long> count(static_cast<std::size_t>(bins), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double h = (locations.row(i) - locations.row(j)).norm();
      if (h > max_dist || h <= 0.0) continue;
      const auto b = std::min(bins - 1, static_cast<int>(std::ceil(h / width)) - 1);
      const double diff = values[i] - values[j];
      lag_sum[static_cast<std::size_t>(b)] += h;
      sq_sum[static_cast<std::size_t>(b)] += diff * diff;
      ++count[static_cast<std::size_t>(b)];
    }
  }
  std::vector<VariogramBin> out;
  for (int b = 0; b < bins; ++b) {
    const auto c = count[static_cast<std::size_t>(b)];
    if (c == 0) continue;
    out.push_back({lag_sum[static_cast<std::size_t>(b)] / c, sq_sum[static_cast<std::size_t>(b)] / (2.0 * c), c});
  }
  if (out.empty()) throw std::invalid_argument("empirical_variogram: no point pairs within max_dist");
  return out;
}

std::string to_string(VariogramFamily f) {
  switch (f) {
    case VariogramFamily::matern:
      return "matern";
    case VariogramFamily::exponential:
      return "exponential";
    case VariogramFamily::spherical:
      return "spherical";
  }
  return "unknown";
}

VariogramFamily variogram_family_from_string(const std::string& name) {
  if (name == "matern") return VariogramFamily::matern;
  if (name == "exponential") return VariogramFamily::exponential;
  if (name == "spherical") return VariogramFamily::spherical;
  throw std::invalid_argument("unknown variogram family '" + name + "'");
}

void VariogramModel::validate() const {
  if (!(sill > 0.0) || !(range > 0.0) || !(nugget >= 0.0)) {
    throw std::invalid_argument("variogram model needs sill > 0, range > 0, nugget >= 0");
  }
  if (family == VariogramFamily::matern && !(nu > 0.0)) throw std::invalid_argument("Matern variogram needs nu > 0");
}

namespace {

// Structured part of the variogram: 0 at h = 0, 1 at h -> inf.
double unit_shape(VariogramFamily family, double h, double range, double nu) {
  if (h <= 0.0) return 0.0;
  switch (family) {
    case VariogramFamily::exponential:
      return 1.0 - std::exp(-h / range);
    case VariogramFamily::spherical: {
      if (h >= range) return 1.0;
      const double r = h / range;
      return 1.5 * r - 0.5 * r * r * r;
    }
    case VariogramFamily::matern:
      return 1.0 - matern_correlation(h, {nu, range});
  }
  return 0.0;
}

}  // namespace

double VariogramModel::gamma(double h) const {
  if (h <= 0.0) return 0.0;
  return nugget + sill * unit_shape(family, h, range, nu);
}

double VariogramModel::covariance(double h) const { return sill + nugget - gamma(h); }

namespace {

struct LinearFit {
  double sill;
  double nugget;
  double sse;
};

// For a fixed shape g_k, min sum (y_k - nugget - sill g_k)^2 with sill > 0,
// nugget >= 0: closed form with the active-set cases enumerated.
LinearFit fit_sill_nugget(const std::vector<VariogramBin>& bins, const std::vector<double>& g) {
  const auto n = static_cast<double>(bins.size());
  double sg = 0, sgg = 0, sy = 0, sgy = 0, syy = 0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    sg += g[k];
    sgg += g[k] * g[k];
    sy += bins[k].gamma;
    sgy += g[k] * bins[k].gamma;
    syy += bins[k].gamma * bins[k].gamma;
  }
  auto sse = [&](double s, double c0) {
    return syy - 2 * s * sgy - 2 * c0 * sy + s * s * sgg + 2 * s * c0 * sg + c0 * c0 * n;
  };
  constexpr double kTiny = 1e-12;
  LinearFit best{kTiny, 0.0, std::numeric_limits<double>::infinity()};
  const double det = n * sgg - sg * sg;
  if (std::abs(det) > 1e-14 * std::max(1.0, n * sgg)) {
    const double s = (n * sgy - sg * sy) / det;
    const double c0 = (sgg * sy - sg * sgy) / det;
    if (s > 0.0 && c0 >= 0.0) best = {s, c0, sse(s, c0)};
  }
  if (sgg > 0.0) {
    const double s = std::max(kTiny, sgy / sgg);
    const double e = sse(s, 0.0);
    if (e < best.sse) best = {s, 0.0, e};
  }
  const double c0 = std::max(0.0, sy / n);
  const double e = sse(kTiny, c0);
  if (e < best.sse) best = {kTiny, c0, e};
  best.sse = std::max(0.0, best.sse);
  return best;
}

VariogramFit fit_fixed_nu(const std::vector<VariogramBin>& bins, VariogramFamily family, double nu) {
  double max_lag = 0.0;
  for (const auto& b : bins) max_lag = std::max(max_lag, b.lag);
  const double lo = std::log(max_lag / 200.0);
  const double hi = std::log(max_lag * 20.0);

  auto evaluate = [&](double log_range) {
    const double range = std::exp(log_range);
    std::vector<double> g(bins.size());
    for (std::size_t k = 0; k < bins.size(); ++k) g[k] = unit_shape(family, bins[k].lag, range, nu);
    const LinearFit lf = fit_sill_nugget(bins, g);
    VariogramFit fit;
    fit.model = {family, lf.sill, range, lf.nugget, nu};
    fit.sse = lf.sse;
    return fit;
  };

  constexpr int kGrid = 80;
  VariogramFit best = evaluate(lo);
  int best_i = 0;
  for (int i = 1; i <= kGrid; ++i) {
    const VariogramFit f = evaluate(lo + (hi - lo) * i / kGrid);
    if (f.sse < best.sse) {
      best = f;
      best_i = i;
    }
  }
  // Golden-section refinement on the bracketing grid cells.
  const double step = (hi - lo) / kGrid;
  double a = lo + step * std::max(0, best_i - 1);
  double b = lo + step * std::min(kGrid, best_i + 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  VariogramFit fc = evaluate(c);
  VariogramFit fd = evaluate(d);
  for (int it = 0; it < 100 && (b - a) > 1e-10; ++it) {
    if (fc.sse < fd.sse) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = evaluate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = evaluate(d);
    }
  }
  for (const auto& f : {fc, fd}) {
    if (f.sse < best.sse) best = f;
  }
  best.converged = best_i != 0 && best_i != kGrid;
  return best;
}

}  // namespace

VariogramFit fit_variogram(const std::vector<VariogramBin>& bins, VariogramFamily family) {
  if (bins.size() < 3) throw std::invalid_argument("fit_variogram: need at least three nonempty bins");
  if (family != VariogramFamily::matern) return fit_fixed_nu(bins, family, 0.5);
  static constexpr std::array<double, 6> kNuGrid{0.3, 0.5, 1.0, 1.5, 2.0, 3.0};
  VariogramFit best;
  best.sse = std::numeric_limits<double>::infinity();
  for (double nu : kNuGrid) {
    const VariogramFit f = fit_fixed_nu(bins, family, nu);
    if (f.sse < best.sse) best = f;
  }
  return best;
}

VariogramFit select_variogram(const std::vector<VariogramBin>& bins) {
  VariogramFit best;
  best.sse = std::numeric_limits<double>::infinity();
  for (auto family : {VariogramFamily::matern, VariogramFamily::exponential, VariogramFamily::spherical}) {
    const VariogramFit f = fit_variogram(bins, family);
    if (f.sse < best.sse) best = f;
  }
  return best;
}

}  // namespace sivae
