#include "sft/special.hpp"

#include <cmath>
#include <string>

#include "sft/errors.hpp"

namespace sft {
namespace {

void check_order(int n) {
  if (n < 0) throw ArgumentError("spherical Bessel order must be >= 0, got " + std::to_string(n));
}

// Ascending series j_n(x) = x^n/(2n+1)!! * sum_k (-x^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1)).
double j_series(int n, double x) {
  double lead = 1.0;
  for (int i = 1; i <= n; ++i) lead *= x / (2.0 * i + 1.0);
  const double z = -0.5 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= z / (k * (2.0 * n + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return lead * sum;
}

double j0_closed(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }
double j1_closed(double x) { return (std::sin(x) / x - std::cos(x)) / x; }

// Upward recurrence, valid when x >= nmax.
std::vector<double> j_upward(int nmax, double x) {
  std::vector<double> j(static_cast<std::size_t>(nmax) + 1);
  j[0] = j0_closed(x);
  if (nmax >= 1) j[1] = j1_closed(x);
  for (int n = 1; n < nmax; ++n) j[n + 1] = (2.0 * n + 1.0) / x * j[n] - j[n - 1];
  return j;
}

// Miller's downward recurrence normalised with sum_k (2k+1) j_k^2 = 1.
std::vector<double> j_miller(int nmax, double x) {
  const int start = nmax + 30 + static_cast<int>(std::ceil(x));
  std::vector<double> f(static_cast<std::size_t>(start) + 2, 0.0);
  // Trial values stay within 1e+-100 so their squares neither overflow nor go subnormal.
  f[start + 1] = 0.0;
  f[start] = 1.0;
  for (int n = start; n >= 1; --n) {
    f[n - 1] = (2.0 * n + 1.0) / x * f[n] - f[n + 1];
    if (std::abs(f[n - 1]) > 1e100) {
      for (int m = n - 1; m <= start + 1; ++m) f[m] *= 1e-100;
    }
  }
  double norm = 0.0;
  for (int n = start; n >= 0; --n) norm += (2.0 * n + 1.0) * f[n] * f[n];
  double scale = 1.0 / std::sqrt(norm);
  // Fix the overall sign against whichever closed form is larger.
  const double j0 = j0_closed(x);
  const double j1 = j1_closed(x);
  if (std::abs(j0) >= std::abs(j1)) {
    if ((j0 < 0) != (f[0] < 0)) scale = -scale;
  } else {
    if ((j1 < 0) != (f[1] < 0)) scale = -scale;
  }
  std::vector<double> j(static_cast<std::size_t>(nmax) + 1);
  for (int n = 0; n <= nmax; ++n) j[n] = f[n] * scale;
  return j;
}

}  // namespace

double sph_bessel_j(int n, double x) {
  check_order(n);
  if (x < 0.0) throw ArgumentError("sph_bessel_j: argument must be >= 0");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n == 0) return j0_closed(x);
  if (x < 0.5 * n) return j_series(n, x);
  if (x >= n) return j_upward(n, x)[n];
  return j_miller(n, x)[n];
}

std::vector<double> sph_bessel_j_array(int nmax, double x) {
  check_order(nmax);
  if (x < 0.0) throw ArgumentError("sph_bessel_j: argument must be >= 0");
  if (x == 0.0) {
    std::vector<double> j(static_cast<std::size_t>(nmax) + 1, 0.0);
    j[0] = 1.0;
    return j;
  }
  if (x < 0.1) {
    std::vector<double> j(static_cast<std::size_t>(nmax) + 1);
    for (int n = 0; n <= nmax; ++n) j[n] = j_series(n, x);
    return j;
  }
  if (x >= nmax) return j_upward(nmax, x);
  return j_miller(nmax, x);
}

std::vector<double> sph_bessel_y_array(int nmax, double x) {
  check_order(nmax);
  if (!(x > 0.0)) throw SingularityError("sph_bessel_y: argument must be > 0");
  std::vector<double> y(static_cast<std::size_t>(nmax) + 1);
  y[0] = -std::cos(x) / x;
  if (nmax >= 1) y[1] = (-std::cos(x) / x - std::sin(x)) / x;
  for (int n = 1; n < nmax; ++n) y[n + 1] = (2.0 * n + 1.0) / x * y[n] - y[n - 1];
  return y;
}

double sph_bessel_y(int n, double x) { return sph_bessel_y_array(n, x)[n]; }

std::vector<cplx> sph_hankel1_array(int nmax, double x) {
  if (!(x > 0.0)) throw SingularityError("sph_hankel1: argument must be > 0");
  const auto j = sph_bessel_j_array(nmax, x);
  const auto y = sph_bessel_y_array(nmax, x);
  std::vector<cplx> h(j.size());
  for (std::size_t n = 0; n < j.size(); ++n) h[n] = {j[n], y[n]};
  return h;
}

cplx sph_hankel1(int n, double x) {
  check_order(n);
  if (!(x > 0.0)) throw SingularityError("sph_hankel1: argument must be > 0");
  return {sph_bessel_j(n, x), sph_bessel_y(n, x)};
}

double sph_bessel_j_deriv(int n, double x) {
  check_order(n);
  if (n == 0) return -sph_bessel_j(1, x);
  if (x == 0.0) return n == 1 ? 1.0 / 3.0 : 0.0;
  const auto j = sph_bessel_j_array(n, x);
  return j[n - 1] - (n + 1.0) / x * j[n];
}

cplx sph_hankel1_deriv(int n, double x) {
  check_order(n);
  if (n == 0) return -sph_hankel1(1, x);
  const auto h = sph_hankel1_array(n, x);
  return h[n - 1] - (n + 1.0) / x * h[n];
}

cplx rigid_baffle_b(int n, double ka) {
  check_order(n);
  if (!(ka > 0.0)) throw SingularityError("rigid_baffle_b: ka must be > 0");
  const auto j = sph_bessel_j_array(n + 1, ka);
  const auto h = sph_hankel1_array(n + 1, ka);
  const double jd = n == 0 ? -j[1] : j[n - 1] - (n + 1.0) / ka * j[n];
  const cplx hd = n == 0 ? -h[1] : h[n - 1] - (n + 1.0) / ka * h[n];
  return j[n] - (jd / hd) * h[n];
}

cplx mixedwave_mode(int n, double k, double radius) {
  check_order(n);
  const double x = k * radius;
  if (!(x > 0.0)) throw SingularityError("mixedwave_mode: kR must be > 0");
  // Finite form of h_n: i x e^{-ix} h_n(x) = (-i)^n sum_s (n+s)!/(s!(n-s)!) (i/(2x))^s
  cplx sum = 1.0;
  cplx term = 1.0;
  for (int s = 1; s <= n; ++s) {
    term *= kI * static_cast<double>((n + s) * (n - s + 1)) / (2.0 * x * s);
    sum += term;
  }
  return ipow(-n) * sum;
}

}  // namespace sft
