#ifndef HELMNYS_SPECIAL_HPP
#define HELMNYS_SPECIAL_HPP

// Bessel/Hankel functions of orders 0 and 1 for positive real argument.
// Power series below the crossover, Hankel asymptotic expansion above.
// The regularized combinations bessel_y0_reg / bessel_y1_reg are what the
// kernel splits need: they stay accurate when the argument is tiny and the
// plain Y functions are dominated by their log / 1/x singularities.

#include <limits>

#include "common.hpp"

namespace helmnys {

namespace detail {

inline constexpr double bessel_series_crossover = 16.0;

inline void check_bessel_arg(double x) {
  if (std::isnan(x)) throw std::domain_error("bessel: NaN argument");
  if (x < 0.0) throw std::domain_error("bessel: negative argument");
}

// H_nu^(1)(x) ~ sqrt(2/(pi x)) e^{i(x - nu pi/2 - pi/4)} sum_k i^k a_k(nu)/x^k,
// a_k(nu) = (4nu^2-1)(4nu^2-9)...(4nu^2-(2k-1)^2)/(k! 8^k).
// Truncated at the smallest term; good to ~1e-14 for x >= 8.
inline Complex hankel1_asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  Complex sum(1.0, 0.0);
  Complex term(1.0, 0.0);
  double prev_mag = std::numeric_limits<double>::max();
  for (int k = 1; k <= 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= Complex(0.0, 1.0) * ((mu - odd * odd) / (8.0 * k * x));
    const double mag = std::abs(term);
    if (mag >= prev_mag) break;  // asymptotic series started diverging
    sum += term;
    prev_mag = mag;
    if (mag < 1e-18 * std::abs(sum)) break;
  }
  // phase reduction in extended precision; in double the rounding of
  // x - pi/4 alone would cost ~x*eps of relative accuracy
  const long double pi_l = 3.141592653589793238462643383279502884L;
  const long double phase =
      static_cast<long double>(x) - 0.5L * nu * pi_l - 0.25L * pi_l;
  const double amp = std::sqrt(2.0 / (pi * x));
  return amp *
         Complex(static_cast<double>(cosl(phase)),
                 static_cast<double>(sinl(phase))) *
         sum;
}

inline double j0_series(double x) {
  const long double q = 0.25L * x * static_cast<long double>(x);
  long double term = 1.0L, sum = 1.0L;
  for (int m = 1; m <= 80; ++m) {
    term *= -q / (static_cast<long double>(m) * m);
    sum += term;
    if (fabsl(term) < 1e-21L * (1.0L + fabsl(sum))) break;
  }
  return static_cast<double>(sum);
}

inline double j1_series(double x) {
  const long double q = 0.25L * x * static_cast<long double>(x);
  long double term = 1.0L, sum = 1.0L;
  for (int m = 1; m <= 80; ++m) {
    term *= -q / (static_cast<long double>(m) * (m + 1.0L));
    sum += term;
    if (fabsl(term) < 1e-21L * (1.0L + fabsl(sum))) break;
  }
  return static_cast<double>(0.5L * x * sum);
}

// (2/pi) sum_{m>=1} (-1)^{m+1} H_m (x^2/4)^m / (m!)^2  with H_m harmonic
inline double y0_reg_series(double x) {
  const long double q = 0.25L * x * static_cast<long double>(x);
  long double term = 1.0L;  // (-q)^m/(m!)^2, starts at m=0
  long double harmonic = 0.0L;
  long double sum = 0.0L;
  for (int m = 1; m <= 80; ++m) {
    term *= -q / (static_cast<long double>(m) * m);
    harmonic += 1.0L / m;
    const long double contrib = -term * harmonic;  // (-1)^{m+1} q^m H_m/(m!)^2
    sum += contrib;
    if (fabsl(contrib) < 1e-21L * (1.0L + fabsl(sum))) break;
  }
  return static_cast<double>((2.0L / 3.141592653589793238462643383279502884L) * sum);
}

// -(1/pi) sum_{m>=0} (-1)^m [psi(m+1)+psi(m+2)] (x/2)^{2m+1} / (m!(m+1)!)
inline double y1_reg_series(double x) {
  const long double q = 0.25L * x * static_cast<long double>(x);
  long double term = 0.5L * x;  // (x/2)^{2m+1}/(m!(m+1)!), starts at m=0
  long double psi_sum = -2.0L * 0.577215664901532860606512090082402431L + 1.0L;
  long double sum = 0.0L;
  for (int m = 0; m <= 80; ++m) {
    const long double contrib = term * psi_sum;
    sum += contrib;
    if (fabsl(contrib) < 1e-21L * (1.0L + fabsl(sum)) && m > 2) break;
    term *= -q / (static_cast<long double>(m + 1) * (m + 2.0L));
    psi_sum += 1.0L / (m + 1.0L) + 1.0L / (m + 2.0L);
  }
  return static_cast<double>(-sum / 3.141592653589793238462643383279502884L);
}

}  // namespace detail

inline double bessel_j0(double x) {
  detail::check_bessel_arg(x);
  if (x < detail::bessel_series_crossover) return detail::j0_series(x);
  return detail::hankel1_asymptotic(0, x).real();
}

inline double bessel_j1(double x) {
  detail::check_bessel_arg(x);
  if (x < detail::bessel_series_crossover) return detail::j1_series(x);
  return detail::hankel1_asymptotic(1, x).real();
}

// Y0(x) - (2/pi)(log(x/2)+gamma) J0(x); smooth and O(x^2) at the origin
inline double bessel_y0_reg(double x) {
  detail::check_bessel_arg(x);
  if (x < detail::bessel_series_crossover) return detail::y0_reg_series(x);
  const Complex h = detail::hankel1_asymptotic(0, x);
  return h.imag() - (2.0 / pi) * (std::log(0.5 * x) + euler_gamma) * h.real();
}

// Y1(x) + 2/(pi x) - (2/pi) log(x/2) J1(x); smooth and O(x) at the origin
inline double bessel_y1_reg(double x) {
  detail::check_bessel_arg(x);
  if (x < detail::bessel_series_crossover) return detail::y1_reg_series(x);
  const Complex h = detail::hankel1_asymptotic(1, x);
  return h.imag() + 2.0 / (pi * x) - (2.0 / pi) * std::log(0.5 * x) * h.real();
}

inline double bessel_y0(double x) {
  detail::check_bessel_arg(x);
  if (x == 0.0) throw std::domain_error("bessel_y0: zero argument");
  if (x < detail::bessel_series_crossover)
    return (2.0 / pi) * (std::log(0.5 * x) + euler_gamma) * detail::j0_series(x) +
           detail::y0_reg_series(x);
  return detail::hankel1_asymptotic(0, x).imag();
}

inline double bessel_y1(double x) {
  detail::check_bessel_arg(x);
  if (x == 0.0) throw std::domain_error("bessel_y1: zero argument");
  if (x < detail::bessel_series_crossover)
    return (2.0 / pi) * std::log(0.5 * x) * detail::j1_series(x) - 2.0 / (pi * x) +
           detail::y1_reg_series(x);
  return detail::hankel1_asymptotic(1, x).imag();
}

inline Complex hankel1_0(double x) {
  detail::check_bessel_arg(x);
  if (x <= 0.0) throw std::domain_error("hankel1_0: nonpositive argument");
  if (x < detail::bessel_series_crossover) return {bessel_j0(x), bessel_y0(x)};
  return detail::hankel1_asymptotic(0, x);
}

inline Complex hankel1_1(double x) {
  detail::check_bessel_arg(x);
  if (x <= 0.0) throw std::domain_error("hankel1_1: nonpositive argument");
  if (x < detail::bessel_series_crossover) return {bessel_j1(x), bessel_y1(x)};
  return detail::hankel1_asymptotic(1, x);
}

// psi(1) = -gamma
inline double digamma_one() { return -euler_gamma; }

}  // namespace helmnys

#endif
