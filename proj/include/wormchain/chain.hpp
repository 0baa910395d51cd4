#pragma once

#include <cstddef>
#include <vector>

#include "wormchain/random.hpp"
#include "wormchain/so3.hpp"

namespace wormchain {

/// Parameters of the freely rotating chain.
///
/// Two parameterizations: raw (bond length a, bond angle theta) or scaled
/// (contour length L, stiffness kappa) with a = L/N and theta = kappa/sqrt(N).
class FrcConfig {
 public:
  static FrcConfig raw(std::size_t n_bonds, double bond_length, double bond_angle);
  static FrcConfig scaled(std::size_t n_bonds, double contour_length, double kappa);

  /// Straight rod with theta = 0. Test oracle only; degenerate for physics.
  static FrcConfig rigid_rod_for_testing(std::size_t n_bonds, double bond_length);

  std::size_t n_bonds() const { return n_bonds_; }
  double bond_length() const { return bond_length_; }
  double bond_angle() const { return bond_angle_; }
  double contour_length() const { return bond_length_ * static_cast<double>(n_bonds_); }
  /// kappa = theta * sqrt(N); equals the scaled-mode input.
  double kappa() const;
  /// 2L / kappa^2. Infinite for the rigid rod.
  double persistence_length() const;
  bool is_scaled() const { return scaled_; }

  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;

 private:
  std::size_t n_bonds_ = 1;
  double bond_length_ = 1.0;
  double bond_angle_ = 0.5;
  double input_contour_length_ = 0.0;
  double input_kappa_ = 0.0;
  bool scaled_ = false;
  bool allow_zero_angle_ = false;
};

/// A realized chain: beads R_0..R_N and the torsions phi_2..phi_N used to
/// build bonds 2..N.
struct DiscreteChain {
  double bond_length = 0.0;
  std::vector<Vec3> beads;
  std::vector<double> phis;

  std::size_t n_bonds() const { return beads.empty() ? 0 : beads.size() - 1; }
  /// Bond Q_n = R_n - R_{n-1}, 1 <= n <= N.
  Vec3 bond(std::size_t n) const { return beads.at(n) - beads.at(n - 1); }
};

/// Steps between re-orthonormalizations of accumulated rotation products.
inline constexpr std::size_t kReorthonormalizeCadence = 1024;

/// Bending rotation H = exp(theta [u]x) with u = (cos phi, sin phi, 0): turns
/// e3 by theta about an axis in the equatorial plane.
Rotation3 bend_rotation(double theta, double phi);

/// Draws a chain with pinned boundary R_0 = 0, R_1 = a e3. Torsions are
/// consumed from `rng` in bond order.
DiscreteChain sample_frc(const FrcConfig& cfg, PathStream& rng);

/// Builds the chain for given torsions phi_2..phi_N (size N-1).
DiscreteChain build_frc(const FrcConfig& cfg, std::vector<double> phis);

/// Piecewise-linear curve through the beads at arclength s in [0, N a].
Vec3 interpolate_path(const DiscreteChain& chain, double s);

/// cos^k(theta), the exact bond-bond correlation E[Q_n . Q_{n+k}] / a^2.
double frc_bond_correlation_oracle(double theta, std::size_t k);

/// Exact E|R_N|^2 = a^2 sum_{i,j} cos^{|i-j|} theta as an O(N) telescoped sum.
double frc_msd_oracle(const FrcConfig& cfg);
/// Same quantity by the O(N^2) double sum.
double frc_msd_direct_sum(std::size_t n_bonds, double bond_length, double theta);

}  // namespace wormchain
