#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "wormchain/random.hpp"
#include "wormchain/so3.hpp"

namespace wormchain {

/// Continuum (Kratky-Porod) chain on a uniform arclength grid.
class KpConfig {
 public:
  /// n_steps = 0 selects the default resolution max(1000, ceil(100 L / ell_p)).
  KpConfig(double contour_length, double ell_p, std::size_t n_steps = 0);

  static std::size_t default_steps(double contour_length, double ell_p);

  double contour_length() const { return contour_length_; }
  double ell_p() const { return ell_p_; }
  std::size_t n_steps() const { return n_steps_; }
  double step() const { return contour_length_ / static_cast<double>(n_steps_); }
  double arclength(std::size_t k) const { return static_cast<double>(k) * step(); }

 private:
  double contour_length_;
  double ell_p_;
  std::size_t n_steps_;
};

/// Increments of the two scalar Brownian motions driving the frame, one pair
/// per grid step, each N(0, h).
struct BrownianDriver {
  double step = 0.0;
  std::vector<std::array<double, 2>> increments;
};

BrownianDriver draw_driver(std::size_t n_steps, double step, PathStream& rng);

/// Gridded sample of the continuum chain.
struct PathSample {
  std::vector<double> grid;
  std::vector<Rotation3> frames;
  std::vector<UnitVec3> tangents;
  std::vector<Vec3> positions;

  std::size_t n_steps() const { return grid.empty() ? 0 : grid.size() - 1; }
};

/// Generator of the frame driver: B = beta1 A1 + beta2 A2 with A1, A2 the
/// so(3) elements carrying the (1,3) and (2,3) entries. In axis-angle
/// coefficients, A1 = (0, 1, 0) and A2 = (-1, 0, 0); A1 e3 = e1, A2 e3 = e2.
SkewSym3 driver_increment(double dbeta1, double dbeta2);

/// One exponential Euler step of dZ = ell^{-1/2} Z dB (Stratonovich):
///   Z' = Z exp(ell^{-1/2} (dbeta1 A1 + dbeta2 A2)).
/// Exact in SO(3) up to round-off.
Rotation3 step_kp(const Rotation3& z, double dbeta1, double dbeta2, double ell);

/// Diffusion length passed to step_kp so that the tangent Q = Z e3 is the
/// spherical Brownian motion generated by Delta_{S^2} / ell_p, i.e.
/// E[Q_s . Q_t] = exp(-2 |t - s| / ell_p). The driver coefficient is then
/// sqrt(2 / ell_p).
inline double frame_diffusion_length(double ell_p) { return 0.5 * ell_p; }

/// Streaming integrator shared by simulate_kp and the ensemble engine.
class KpIntegrator {
 public:
  explicit KpIntegrator(const KpConfig& cfg);

  void advance(double dbeta1, double dbeta2);

  std::size_t index() const { return index_; }
  double arclength() const { return static_cast<double>(index_) * step_; }
  const Rotation3& frame() const { return frame_; }
  const Vec3& tangent() const { return tangent_; }
  const Vec3& position() const { return position_; }

 private:
  double step_;
  double diffusion_length_;
  std::size_t index_ = 0;
  Rotation3 frame_;
  Vec3 tangent_ = Vec3::UnitZ();
  Vec3 position_ = Vec3::Zero();
};

/// Draws a driver from `rng` and integrates it.
PathSample simulate_kp(const KpConfig& cfg, PathStream& rng);
/// Integrates a given driver (must have cfg.n_steps() increments).
PathSample simulate_kp(const KpConfig& cfg, const BrownianDriver& driver);

/// Tangent at the last grid point <= s.
UnitVec3 tangent_at(const PathSample& path, double s);

}  // namespace wormchain
