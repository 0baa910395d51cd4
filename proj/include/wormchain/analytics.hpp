#pragma once

#include <map>
#include <string>

namespace wormchain {

// Closed-form statistics of the continuum chain. Tangent correlations decay
// as exp(-2|t-s|/ell_p); note that part of the polymer literature writes the
// exponent as |t-s|/ell_p, which rescales ell_p by a factor of 2.

/// E[Q_s . Q_t] = exp(-2 |t - s| / ell_p).
double kp_tangent_correlation(double ell_p, double s, double t);

/// E|R_t|^2 = ell_p t - (ell_p^2 / 2) (1 - exp(-2 t / ell_p)).
/// Below t/ell_p = 1e-4 a Taylor series replaces the cancelling difference.
double kp_mean_sq_position(double ell_p, double t);

/// Ratio t/ell_p below which kp_mean_sq_position uses its Taylor branch.
inline constexpr double kMsdTaylorSwitch = 1e-4;

/// Covariance of W_s = int_0^s beta_u du for a standard Brownian motion:
/// int_0^s int_0^t min(u, v) du dv = s^2 (3t - s) / 6 for s <= t.
double hard_rod_fluctuation_cov(double s, double t);

/// Covariance min(s, t) of a standard Brownian motion component.
double random_coil_cov(double s, double t);

/// Named closed form with its parameters, for report metadata.
struct ClosedForm {
  std::string name;
  std::map<std::string, double> params;

  double evaluate() const;
};

}  // namespace wormchain
