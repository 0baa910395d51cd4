#include "wormchain/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wormchain {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || std::isnan(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + " must be non-negative");
}

}  // namespace

double kp_tangent_correlation(double ell_p, double s, double t) {
  require_positive(ell_p, "ell_p");
  require_nonnegative(s, "s");
  require_nonnegative(t, "t");
  if (std::isinf(ell_p)) return 1.0;
  return std::exp(-2.0 * std::abs(t - s) / ell_p);
}

double kp_mean_sq_position(double ell_p, double t) {
  require_positive(ell_p, "ell_p");
  require_nonnegative(t, "t");
  if (std::isinf(ell_p)) return t * t;
  const double x = t / ell_p;
  if (x < kMsdTaylorSwitch) {
    // t^2 sum_m (-1)^m 2^{m+1} x^m / (m+2)!
    return t * t * (1.0 - x * (2.0 / 3.0 - x * (1.0 / 3.0 - x * (2.0 / 15.0 - x * (2.0 / 45.0)))));
  }
  return ell_p * t + 0.5 * ell_p * ell_p * std::expm1(-2.0 * x);
}

double hard_rod_fluctuation_cov(double s, double t) {
  require_nonnegative(s, "s");
  require_nonnegative(t, "t");
  const double lo = std::min(s, t);
  const double hi = std::max(s, t);
  return lo * lo * (3.0 * hi - lo) / 6.0;
}

double random_coil_cov(double s, double t) {
  require_nonnegative(s, "s");
  require_nonnegative(t, "t");
  return std::min(s, t);
}

double ClosedForm::evaluate() const {
  auto get = [this](const char* key) {
    auto it = params.find(key);
    if (it == params.end()) throw std::invalid_argument(name + ": missing parameter " + key);
    return it->second;
  };
  if (name == "kp_tangent_correlation") return kp_tangent_correlation(get("ell_p"), get("s"), get("t"));
  if (name == "kp_mean_sq_position") return kp_mean_sq_position(get("ell_p"), get("t"));
  if (name == "hard_rod_fluctuation_cov") return hard_rod_fluctuation_cov(get("s"), get("t"));
  if (name == "random_coil_cov") return random_coil_cov(get("s"), get("t"));
  throw std::invalid_argument("unknown closed form: " + name);
}

}  // namespace wormchain
