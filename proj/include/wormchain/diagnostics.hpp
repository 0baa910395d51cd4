#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wormchain/ensemble.hpp"

namespace wormchain {

inline constexpr double kDefaultZThreshold = 4.0;

enum class CheckKind {
  /// z = (estimate - oracle) / std_error.
  ZScore,
  /// One-sided bound estimate <= oracle; z = estimate / oracle, threshold 1.
  UpperBound,
};

/// One Monte Carlo estimate judged against its oracle. In both kinds
/// pass == (|z| <= threshold).
struct ComparisonReport {
  std::string observable;
  double s = 0.0;
  double t = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double oracle = 0.0;
  double z = 0.0;
  bool pass = false;
  double threshold = kDefaultZThreshold;
  CheckKind kind = CheckKind::ZScore;
};

/// Estimates that agree with the oracle to this relative tolerance get z = 0
/// even when std_error is 0 (deterministic observables).
inline constexpr double kExactAgreementTol = 1e-12;

ComparisonReport compare(std::string observable, double s, double t, Estimate est, double oracle,
                         double threshold = kDefaultZThreshold);
ComparisonReport upper_bound_check(std::string observable, double s, double t, Estimate est,
                                   double bound);
/// Recomputes z and pass from (estimate, std_error, oracle, threshold, kind).
ComparisonReport rejudge(const ComparisonReport& r);

bool all_pass(const std::vector<ComparisonReport>& reports);

// --- continuum chain: tangent correlation and mean-square position ---------

/// Observables Q_s.Q_t for each (s, t) pair and |R_t|^2 for each t.
std::vector<Observable> kp_observables(const Grid& grid,
                                       const std::vector<std::pair<double, double>>& tangent_pairs,
                                       const std::vector<double>& msd_points);

/// MC mean of Q_s.Q_t against exp(-2|t-s|/ell_p).
ComparisonReport estimate_tangent_correlation(const EnsembleSummary& summary, const Grid& grid,
                                              double ell_p, double s, double t,
                                              double threshold = kDefaultZThreshold);

/// MC mean of |R_t|^2 against ell_p t - ell_p^2 (1 - exp(-2t/ell_p)) / 2.
ComparisonReport estimate_msd(const EnsembleSummary& summary, const Grid& grid, double ell_p,
                              double t, double threshold = kDefaultZThreshold);

/// Tangent correlations E[Q_0.Q_s] at s in {L/4, L/2, L} plus E[Q_{L/2}.Q_L].
std::vector<ComparisonReport> correlation_suite(const KpConfig& cfg, std::size_t n_paths,
                                                std::uint64_t seed, EnsembleOptions options = {},
                                                double threshold = kDefaultZThreshold);
/// E|R_t|^2 at t in {L/4, L/2, L}.
std::vector<ComparisonReport> msd_suite(const KpConfig& cfg, std::size_t n_paths, std::uint64_t seed,
                                        EnsembleOptions options = {},
                                        double threshold = kDefaultZThreshold);

// --- discrete chain --------------------------------------------------------

/// Bond correlations Q_1.Q_{1+k}/a^2 against cos^k(theta) for each lag, and
/// |R_N|^2 against frc_msd_oracle.
std::vector<ComparisonReport> frc_oracle_suite(const FrcConfig& cfg, const std::vector<std::size_t>& lags,
                                               std::size_t n_paths, std::uint64_t seed,
                                               EnsembleOptions options = {},
                                               double threshold = kDefaultZThreshold);

/// Deterministic distance between the exact discrete-chain value and the
/// continuum closed form at matched arclength, with the MC estimate.
struct GapRow {
  std::size_t n_bonds = 0;
  double s = 0.0;
  std::string observable;
  double frc_oracle = 0.0;
  double kp_closed_form = 0.0;
  double gap = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
};

struct ConvergenceTable {
  /// FRC-oracle comparisons for every N, plus the row "kp_gap_monotone".
  std::vector<ComparisonReport> reports;
  std::vector<GapRow> gaps;
};

/// Relative slack allowed on the monotone decrease of the end-to-end
/// correlation gap, as a fraction of the smallest gap.
inline constexpr double kGapMonotoneSlack = 0.1;

/// Discrete chains with a = L/N, theta = kappa/sqrt(N) for each N, compared
/// at s in {L/4, L/2, L} against their exact oracles and against the
/// continuum closed forms with ell_p = 2L/kappa^2.
ConvergenceTable convergence_table(double contour_length, double kappa,
                                   const std::vector<std::size_t>& n_list, std::size_t n_paths,
                                   std::uint64_t seed, EnsembleOptions options = {},
                                   double threshold = kDefaultZThreshold);

// --- persistence-length limits ---------------------------------------------

struct DiagnosticsTable {
  std::vector<ComparisonReport> reports;
  std::vector<std::string> warnings;
};

inline constexpr double kHardRodSupBound = 0.05;
inline constexpr double kHardRodAxialRatioBound = 0.05;

/// Stiff limit: transverse variances of sqrt(ell_p)(R_s - s e3) against
/// s^3/3, the axial-to-transverse variance ratio, and the mean sup-distance
/// from the straight rod. Evaluated at s = jL/grid_points, j = 1..grid_points.
DiagnosticsTable hard_rod_diagnostics(double ell_p, double contour_length, std::size_t n_paths,
                                      std::size_t grid_points, std::uint64_t seed,
                                      EnsembleOptions options = {},
                                      double threshold = kDefaultZThreshold, std::size_t n_steps = 0);

/// Flexible limit: sqrt(3/ell_p) R_s against standard 3-d Brownian motion
/// (per-component variance s, zero cross-covariance, independent increments)
/// and the exact scaled mean-square position.
DiagnosticsTable random_coil_diagnostics(double ell_p, double contour_length, std::size_t n_paths,
                                         std::size_t grid_points, std::uint64_t seed,
                                         EnsembleOptions options = {},
                                         double threshold = kDefaultZThreshold,
                                         std::size_t n_steps = 0);

// --- flake policy ------------------------------------------------------------

struct SuiteOutcome {
  std::vector<ComparisonReport> reports;
  std::vector<std::string> warnings;
  unsigned attempts = 0;
  std::uint64_t seed_used = 0;
  bool passed = false;
};

/// Runs `suite` with `seed`; on any failure reruns once with rerun_seed(seed, 1).
/// The outcome of the last attempt is returned.
SuiteOutcome run_with_rerun(const std::function<DiagnosticsTable(std::uint64_t)>& suite,
                            std::uint64_t seed);

}  // namespace wormchain
