#pragma once

namespace sivae {

/// Modified Bessel function of the second kind K_nu(x) for real order
/// nu >= 0 and x > 0. Temme's series is used for x < 2 and Steed's
/// continued fraction otherwise; orders above 1/2 are reached by forward
/// recurrence from |mu| <= 1/2. Throws std::domain_error for x <= 0 or nu < 0.
double bessel_k(double nu, double x);

/// exp(x) * K_nu(x); avoids underflow for large arguments.
double bessel_k_scaled(double nu, double x);

/// x^nu K_nu(x), finite at x -> 0 where it tends to 2^(nu-1) Gamma(nu).
double matern_kernel_term(double nu, double x);

}  // namespace sivae
