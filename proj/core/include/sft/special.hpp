#pragma once

#include <vector>

#include "sft/types.hpp"

namespace sft {

/// Spherical Bessel function of the first kind j_n(x), n >= 0, x >= 0.
///
/// Uses the ascending series for x < n/2, upward recurrence for x >= n and
/// Miller's downward recurrence (normalised with the sum rule
/// sum_k (2k+1) j_k^2 = 1) in between.
double sph_bessel_j(int n, double x);

/// j_0(x) ... j_nmax(x) in one pass.
std::vector<double> sph_bessel_j_array(int nmax, double x);

/// Spherical Bessel function of the second kind y_n(x), x > 0.
double sph_bessel_y(int n, double x);
std::vector<double> sph_bessel_y_array(int nmax, double x);

/// Spherical Hankel function of the first kind h_n(x) = j_n(x) + i y_n(x), x > 0.
/// Outgoing for the e^{-iwt} time convention.
cplx sph_hankel1(int n, double x);
std::vector<cplx> sph_hankel1_array(int nmax, double x);

/// d/dx j_n(x) from j_{n-1} - (n+1)/x j_n (j_0' = -j_1).
double sph_bessel_j_deriv(int n, double x);
cplx sph_hankel1_deriv(int n, double x);

/// Rigid-sphere modal response b_n(ka) = j_n - (j_n'/h_n') h_n.
cplx rigid_baffle_b(int n, double ka);

/// Mode strength of a mixedwave source at radius R: i k R e^{-ikR} h_n(kR).
/// Tends to (-i)^n as kR grows.
cplx mixedwave_mode(int n, double k, double radius);

}  // namespace sft
