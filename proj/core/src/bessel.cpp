#include "sivae/bessel.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sivae {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// Taylor coefficients of 1/Gamma(z) = sum_k c[k-1] z^k (A&S 6.1.34).
constexpr std::array<double, 26> kRecipGamma = {
    1.0000000000000000,  0.5772156649015329,  -0.6558780715202538, -0.0420026350340952,
    0.1665386113822915,  -0.0421977345555443, -0.0096219715278770, 0.0072189432466630,
    -0.0011651675918591, -0.0002152416741149, 0.0001280502823882,  -0.0000201348547807,
    -0.0000012504934821, 0.0000011330272320,  -0.0000002056338417, 0.0000000061160950,
    0.0000000050020075,  -0.0000000011812746, 0.0000000001043427,  0.0000000000077823,
    -0.0000000000036968, 0.0000000000005100,  -0.0000000000000206, -0.0000000000000054,
    0.0000000000000014,  0.0000000000000001};

struct TemmeGammas {
  double gam1;   // (1/G(1-mu) - 1/G(1+mu)) / (2 mu)
  double gam2;   // (1/G(1-mu) + 1/G(1+mu)) / 2
  double gampl;  // 1/G(1+mu)
  double gammi;  // 1/G(1-mu)
};

TemmeGammas temme_gammas(double mu) {
  // 1/G(1+mu) = sum_k c_k mu^(k-1); split into even and odd powers of mu.
  double even = 0.0;  // sum over odd k: c_k mu^(k-1)
  double odd = 0.0;   // sum over even k: c_k mu^(k-2)
  const double mu2 = mu * mu;
  for (int k = static_cast<int>(kRecipGamma.size()); k >= 1; --k) {
    if (k % 2 == 1) {
      even = even * mu2 + kRecipGamma[k - 1];
    } else {
      odd = odd * mu2 + kRecipGamma[k - 1];
    }
  }
  TemmeGammas g{};
  g.gam1 = -odd;
  g.gam2 = even;
  g.gampl = even + mu * odd;
  g.gammi = even - mu * odd;
  return g;
}

struct KPair {
  double k_mu;
  double k_mu1;
};

// K_mu(x), K_{mu+1}(x) for |mu| <= 1/2, x < 2, via Temme's series.
KPair temme_series(double mu, double x) {
  const double x2 = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);

  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double di = i;
    ff = (di * ff + p + q) / (di * di - mu * mu);
    c *= d / di;
    p /= di - mu;
    q /= di + mu;
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - di * ff);
    if (std::abs(del) < std::abs(sum) * kEps) {
      return {sum, sum1 * 2.0 / x};
    }
  }
  throw std::runtime_error("bessel_k: Temme series failed to converge");
}

// exp(x) K_mu(x), exp(x) K_{mu+1}(x) for |mu| <= 1/2, x >= 2, via Steed's CF2.
KPair steed_cf2_scaled(double mu, double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= kMaxIter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) {
      h = a1 * h;
      const double k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
      return {k_mu, k_mu * (mu + x + 0.5 - h) / x};
    }
  }
  throw std::runtime_error("bessel_k: continued fraction failed to converge");
}

void check_args(double nu, double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k: argument must be positive");
  if (!(nu >= 0.0)) throw std::domain_error("bessel_k: order must be nonnegative");
}

// Forward recurrence K_{mu+i+1} = 2(mu+i)/x K_{mu+i} + K_{mu+i-1}; the
// scaled and unscaled sequences obey the same recurrence.
double recur_up(KPair start, double mu, int steps, double x) {
  double k_lo = start.k_mu;
  double k_hi = start.k_mu1;
  for (int i = 1; i <= steps; ++i) {
    const double next = (mu + i) * (2.0 / x) * k_hi + k_lo;
    k_lo = k_hi;
    k_hi = next;
  }
  return k_lo;
}

}  // namespace

double bessel_k_scaled(double nu, double x) {
  check_args(nu, x);
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  KPair start{};
  if (x < 2.0) {
    start = temme_series(mu, x);
    const double ex = std::exp(x);
    start.k_mu *= ex;
    start.k_mu1 *= ex;
  } else {
    start = steed_cf2_scaled(mu, x);
  }
  return recur_up(start, mu, nl, x);
}

double bessel_k(double nu, double x) {
  check_args(nu, x);
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  if (x < 2.0) return recur_up(temme_series(mu, x), mu, nl, x);
  return bessel_k_scaled(nu, x) * std::exp(-x);
}

double matern_kernel_term(double nu, double x) {
  if (!(nu > 0.0)) throw std::domain_error("matern_kernel_term: order must be positive");
  const double limit = std::exp2(nu - 1.0) * std::tgamma(nu);
  if (x <= 0.0) return limit;
  if (x > 2.0) {
    // Stay in log space so exp(-x) and x^nu do not under/overflow separately.
    const double log_val = nu * std::log(x) - x + std::log(bessel_k_scaled(nu, x));
    return std::exp(log_val);
  }
  const double v = std::pow(x, nu) * bessel_k(nu, x);
  return std::isfinite(v) ? v : limit;
}

}  // namespace sivae
