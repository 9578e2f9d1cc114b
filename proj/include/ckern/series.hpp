#ifndef CKERN_SERIES_HPP
#define CKERN_SERIES_HPP

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "ckern/error.hpp"

namespace ckern {

/// Truncation control for the one-dimensional lattice heat kernel series.
struct SeriesControl {
  double abs_tol = 1e-14;
  int k_max = 400;
};

namespace detail {

// Sums (−1)^n Σ_{k≥n} C(2k,k+n)/k!·(−t/2)^k. The terms alternate and peak
// near e^{2t}, so the working precision must cover 2t/ln10 digits of
// cancellation on top of the target accuracy.
template <typename Real>
double z_series_sum(std::int64_t n, double t, const SeriesControl& ctl) {
  const Real tt = t;
  const Real half = tt / 2;
  Real term = 1;
  for (std::int64_t i = 1; i <= n; ++i) term *= half / i;  // (t/2)^n/n!, sign already folded in
  Real sum = term;
  Real max_seen = abs(term);
  const double k_floor = std::max(t, static_cast<double>(n));
  for (std::int64_t k = n, count = 1;; ++k, ++count) {
    const Real threshold = Real(ctl.abs_tol) * (max_seen < 1 ? max_seen : Real(1));
    if (static_cast<double>(k) >= k_floor && abs(term) < threshold) break;
    if (count >= ctl.k_max) {
      throw numeric_error("z_series_coeff: no convergence after " + std::to_string(ctl.k_max) +
                          " terms (a=" + std::to_string(n) + ", t=" + std::to_string(t) +
                          ", last term " + std::to_string(static_cast<double>(abs(term))) + ")");
    }
    // term_{k+1} / term_k = −t(2k+1) / ((k+1+n)(k+1−n))
    term *= -tt * (2 * k + 1);
    term /= Real((k + 1 + n) * (k + 1 - n));
    sum += term;
    if (abs(term) > max_seen) max_seen = abs(term);
  }
  return static_cast<double>(sum);
}

}  // namespace detail

/// (−1)^{|a|} Σ_{k≥0} C(2k, k+|a|)/k! · (−t/2)^k, the heat kernel of the
/// unit-weight integer line at offset a. Equal to e^{−t}·I_{|a|}(t).
inline double z_series_coeff(std::int64_t a, double t, const SeriesControl& ctl = {}) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw precondition_error("z_series_coeff: t must be finite and >= 0");
  if (!(ctl.abs_tol > 0.0)) throw precondition_error("z_series_coeff: abs_tol must be > 0");
  const std::int64_t n = a < 0 ? -a : a;
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  using namespace boost::multiprecision;
  if (t <= 16.0) return detail::z_series_sum<cpp_bin_float_50>(n, t, ctl);
  return detail::z_series_sum<cpp_bin_float_100>(n, t, ctl);
}

/// Power-series / quadrature switch for the modified Bessel function.
inline constexpr double kBesselSeriesLimit = 600.0;

/// e^{−t}·I_x(t). Power series up to t = 600 with the e^{−t} factor folded
/// into the leading term (all terms positive, so no cancellation);
/// adaptive Gauss–Kronrod on (1/π)∫₀^π e^{t(cos θ−1)}cos(xθ)dθ beyond.
inline double bessel_i_scaled(std::int64_t x, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw precondition_error("bessel_i: t must be finite and >= 0");
  const std::int64_t n = x < 0 ? -x : x;
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  if (t <= kBesselSeriesLimit) {
    const double half = 0.5 * t, nd = static_cast<double>(n);
    double term = std::exp(nd * std::log(half) - std::lgamma(nd + 1.0) - t);
    double sum = term;
    for (std::int64_t k = 0; term > 0.0 && (static_cast<double>(k) < half || term > 1e-18 * sum); ++k) {
      term *= half * half / (static_cast<double>(k + 1) * static_cast<double>(n + k + 1));
      sum += term;
    }
    return sum;
  }
  const double pi = boost::math::constants::pi<double>();
  const auto f = [t, n](double theta) {
    return std::exp(t * (std::cos(theta) - 1.0)) * std::cos(static_cast<double>(n) * theta);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, pi, 20, 1e-15) / pi;
}

/// I_x(t) for integer order x and t ≥ 0.
inline double bessel_i(std::int64_t x, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw precondition_error("bessel_i: t must be finite and >= 0");
  return std::exp(t) * bessel_i_scaled(x, t);
}

}  // namespace ckern

#endif  // CKERN_SERIES_HPP
