#pragma once

namespace cbi {

/// Scalar integrals of exponentials over the unit interval. Every matrix
/// integral in this library reduces to these after projecting onto the
/// eigenbasis of the doubly symmetric mean matrix, so the removable
/// singularities at zero exponent are handled here once.

/// e1(w) = int_0^1 exp(w u) du = expm1(w)/w, with value 1 at w = 0.
double unit_exp_integral(double w);

/// int_0^1 x^u du for x > 0; equals (x-1)/log(x) away from x = 1.
double unit_pow_integral(double x);

/// int_0^1 x^(1-u) y^u du for x, y > 0.
double cross_pow_integral(double x, double y);

/// int_0^1 (1-u)^m exp(w u) du for m >= 0.
double unit_poly_exp_integral(int m, double w);

/// k(a,w) = int_0^1 [(exp(a(1-u)) - 1)/a] exp(w u) du, with the a -> 0
/// limit int_0^1 (1-u) exp(w u) du.
double ramp_exp_integral(double a, double w);

}  // namespace cbi
