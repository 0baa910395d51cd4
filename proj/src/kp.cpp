#include "wormchain/kp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wormchain/chain.hpp"

namespace wormchain {

KpConfig::KpConfig(double contour_length, double ell_p, std::size_t n_steps)
    : contour_length_(contour_length), ell_p_(ell_p), n_steps_(n_steps) {
  if (!(contour_length > 0.0) || !std::isfinite(contour_length)) {
    throw std::invalid_argument("KpConfig: contour length must be positive and finite");
  }
  if (!(ell_p > 0.0) || !std::isfinite(ell_p)) {
    throw std::invalid_argument("KpConfig: persistence length must be positive and finite");
  }
  if (n_steps_ == 0) n_steps_ = default_steps(contour_length, ell_p);
}

std::size_t KpConfig::default_steps(double contour_length, double ell_p) {
  const double resolved = std::ceil(100.0 * contour_length / ell_p);
  return std::max<std::size_t>(1000, static_cast<std::size_t>(resolved));
}

BrownianDriver draw_driver(std::size_t n_steps, double step, PathStream& rng) {
  BrownianDriver d;
  d.step = step;
  d.increments.resize(n_steps);
  const double sd = std::sqrt(step);
  for (auto& inc : d.increments) {
    inc[0] = sd * rng.normal();
    inc[1] = sd * rng.normal();
  }
  return d;
}

SkewSym3 driver_increment(double dbeta1, double dbeta2) {
  return hat(Vec3(-dbeta2, dbeta1, 0.0));
}

Rotation3 step_kp(const Rotation3& z, double dbeta1, double dbeta2, double ell) {
  const double c = 1.0 / std::sqrt(ell);
  return compose(z, exp_rodrigues(driver_increment(c * dbeta1, c * dbeta2)));
}

KpIntegrator::KpIntegrator(const KpConfig& cfg)
    : step_(cfg.step()), diffusion_length_(frame_diffusion_length(cfg.ell_p())) {}

void KpIntegrator::advance(double dbeta1, double dbeta2) {
  frame_ = step_kp(frame_, dbeta1, dbeta2, diffusion_length_);
  ++index_;
  if (index_ % kReorthonormalizeCadence == 0) frame_ = reorthonormalize(frame_);
  const Vec3 next = frame_.column(2);
  position_ += (0.5 * step_) * (tangent_ + next);
  tangent_ = next;
}

PathSample simulate_kp(const KpConfig& cfg, const BrownianDriver& driver) {
  const std::size_t n = cfg.n_steps();
  if (driver.increments.size() != n) {
    throw std::invalid_argument("simulate_kp: driver length does not match n_steps");
  }
  PathSample path;
  path.grid.reserve(n + 1);
  path.frames.reserve(n + 1);
  path.tangents.reserve(n + 1);
  path.positions.reserve(n + 1);

  KpIntegrator integ(cfg);
  auto record = [&] {
    path.grid.push_back(cfg.arclength(integ.index()));
    path.frames.push_back(integ.frame());
    path.tangents.push_back(UnitVec3::from(integ.tangent()));
    path.positions.push_back(integ.position());
  };
  record();
  for (const auto& inc : driver.increments) {
    integ.advance(inc[0], inc[1]);
    record();
  }
  return path;
}

PathSample simulate_kp(const KpConfig& cfg, PathStream& rng) {
  return simulate_kp(cfg, draw_driver(cfg.n_steps(), cfg.step(), rng));
}

UnitVec3 tangent_at(const PathSample& path, double s) {
  if (path.grid.empty()) throw std::invalid_argument("tangent_at: empty path");
  const double length = path.grid.back();
  if (!(s >= 0.0 && s <= length)) throw std::invalid_argument("tangent_at: s out of [0, L]");
  const double h = path.n_steps() > 0 ? length / static_cast<double>(path.n_steps()) : 1.0;
  // Grid points within round-off of s count as <= s.
  auto k = static_cast<std::size_t>(std::floor(s / h + 1e-9));
  k = std::min(k, path.grid.size() - 1);
  return path.tangents[k];
}

}  // namespace wormchain
