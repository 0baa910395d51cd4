#include "wormchain/chain.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wormchain {

FrcConfig FrcConfig::raw(std::size_t n_bonds, double bond_length, double bond_angle) {
  FrcConfig c;
  c.n_bonds_ = n_bonds;
  c.bond_length_ = bond_length;
  c.bond_angle_ = bond_angle;
  c.validate();
  return c;
}

FrcConfig FrcConfig::scaled(std::size_t n_bonds, double contour_length, double kappa) {
  if (n_bonds == 0) throw std::invalid_argument("FrcConfig: n_bonds must be >= 1");
  if (!(contour_length > 0.0) || !std::isfinite(contour_length)) {
    throw std::invalid_argument("FrcConfig: contour length must be positive");
  }
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("FrcConfig: kappa must be positive");
  }
  FrcConfig c;
  c.n_bonds_ = n_bonds;
  c.scaled_ = true;
  c.input_contour_length_ = contour_length;
  c.input_kappa_ = kappa;
  const double n = static_cast<double>(n_bonds);
  c.bond_length_ = contour_length / n;
  c.bond_angle_ = kappa / std::sqrt(n);
  c.validate();
  return c;
}

FrcConfig FrcConfig::rigid_rod_for_testing(std::size_t n_bonds, double bond_length) {
  FrcConfig c;
  c.n_bonds_ = n_bonds;
  c.bond_length_ = bond_length;
  c.bond_angle_ = 0.0;
  c.allow_zero_angle_ = true;
  c.validate();
  return c;
}

double FrcConfig::kappa() const {
  return scaled_ ? input_kappa_ : bond_angle_ * std::sqrt(static_cast<double>(n_bonds_));
}

double FrcConfig::persistence_length() const {
  const double k = kappa();
  if (k == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * contour_length() / (k * k);
}

void FrcConfig::validate() const {
  if (n_bonds_ < 1) throw std::invalid_argument("FrcConfig: n_bonds must be >= 1");
  if (!(bond_length_ > 0.0) || !std::isfinite(bond_length_)) {
    throw std::invalid_argument("FrcConfig: bond length must be positive and finite");
  }
  if (!std::isfinite(bond_angle_)) throw std::invalid_argument("FrcConfig: bond angle not finite");
  const bool zero_ok = allow_zero_angle_ && bond_angle_ == 0.0;
  if (!zero_ok && !(bond_angle_ > 0.0 && bond_angle_ < std::numbers::pi)) {
    throw std::invalid_argument(scaled_ ? "FrcConfig: kappa/sqrt(N) must lie in (0, pi)"
                                        : "FrcConfig: bond angle must lie in (0, pi)");
  }
}

Rotation3 bend_rotation(double theta, double phi) {
  return exp_rodrigues(hat(Vec3(std::cos(phi), std::sin(phi), 0.0) * theta));
}

DiscreteChain build_frc(const FrcConfig& cfg, std::vector<double> phis) {
  cfg.validate();
  const std::size_t n = cfg.n_bonds();
  if (phis.size() != n - 1) throw std::invalid_argument("build_frc: need N-1 torsion angles");

  const double a = cfg.bond_length();
  const double theta = cfg.bond_angle();
  DiscreteChain chain;
  chain.bond_length = a;
  chain.beads.reserve(n + 1);
  chain.beads.emplace_back(Vec3::Zero());
  chain.beads.emplace_back(0.0, 0.0, a);

  // Z_1 = I; Z_n = Z_{n-1} H_n; Q_n = a Z_n e3.
  Rotation3 z;
  for (std::size_t k = 2; k <= n; ++k) {
    z = compose(z, bend_rotation(theta, phis[k - 2]));
    if ((k - 1) % kReorthonormalizeCadence == 0) z = reorthonormalize(z);
    chain.beads.emplace_back(chain.beads.back() + a * z.column(2));
  }
  chain.phis = std::move(phis);
  return chain;
}

DiscreteChain sample_frc(const FrcConfig& cfg, PathStream& rng) {
  cfg.validate();
  std::vector<double> phis(cfg.n_bonds() - 1);
  for (auto& phi : phis) phi = 2.0 * std::numbers::pi * rng.uniform();
  return build_frc(cfg, std::move(phis));
}

Vec3 interpolate_path(const DiscreteChain& chain, double s) {
  const std::size_t n = chain.n_bonds();
  const double length = chain.bond_length * static_cast<double>(n);
  if (!(s >= 0.0 && s <= length)) throw std::invalid_argument("interpolate_path: s out of [0, N a]");
  const double x = s / chain.bond_length;
  auto k = static_cast<std::size_t>(std::floor(x));
  if (k >= n) return chain.beads[n];
  const double frac = x - static_cast<double>(k);
  if (frac == 0.0) return chain.beads[k];
  return chain.beads[k] + frac * (chain.beads[k + 1] - chain.beads[k]);
}

double frc_bond_correlation_oracle(double theta, std::size_t k) {
  return std::pow(std::cos(theta), static_cast<double>(k));
}

double frc_msd_oracle(const FrcConfig& cfg) {
  cfg.validate();
  // sum_{i,j} c^{|i-j|} = N + 2 sum_{k=1}^{N-1} (N-k) c^k
  const std::size_t n = cfg.n_bonds();
  const double c = std::cos(cfg.bond_angle());
  double ck = 1.0;
  double tail = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    ck *= c;
    tail += static_cast<double>(n - k) * ck;
  }
  const double a = cfg.bond_length();
  return a * a * (static_cast<double>(n) + 2.0 * tail);
}

double frc_msd_direct_sum(std::size_t n_bonds, double bond_length, double theta) {
  const double c = std::cos(theta);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_bonds; ++i) {
    for (std::size_t j = 0; j < n_bonds; ++j) {
      const auto lag = i > j ? i - j : j - i;
      sum += std::pow(c, static_cast<double>(lag));
    }
  }
  return bond_length * bond_length * sum;
}

}  // namespace wormchain
