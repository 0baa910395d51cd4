#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wormchain/chain.hpp"
#include "wormchain/kp.hpp"
#include "wormchain/so3.hpp"

namespace wormchain {

using ModelConfig = std::variant<FrcConfig, KpConfig>;

/// Uniform arclength grid of a model: beads of the discrete chain, or the
/// integration grid of the continuum chain.
struct Grid {
  double step = 1.0;
  std::size_t n_steps = 0;

  double length() const { return step * static_cast<double>(n_steps); }
  double at(std::size_t k) const { return step * static_cast<double>(k); }
  /// Nearest grid index to s. Throws std::invalid_argument outside [0, length].
  std::size_t snap(double s) const;
};

Grid grid_of(const ModelConfig& model);

/// State of a path at one grid point. For the discrete chain the tangent at
/// bead n is the unit bond leaving it, Q_{n+1}/a (the last bead reuses Q_N/a).
struct Snapshot {
  double s = 0.0;
  Vec3 tangent = Vec3::UnitZ();
  Vec3 position = Vec3::Zero();
};

/// Scalar functional of a path, evaluated from snapshots at `indices` (passed
/// to `eval` in the same order).
struct Observable {
  std::string name;
  double s = 0.0;
  double t = 0.0;
  std::vector<std::size_t> indices;
  std::function<double(std::span<const Snapshot>)> eval;
};

struct ObservableInfo {
  std::string name;
  double s = 0.0;
  double t = 0.0;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Mergeable multivariate accumulator: count, means and the full co-moment
/// matrix sum (x_i - mean_i)(x_j - mean_j) of a fixed list of observables.
class EnsembleSummary {
 public:
  EnsembleSummary() = default;
  explicit EnsembleSummary(std::vector<ObservableInfo> info);

  void add(std::span<const double> values);
  /// Chan et al. pairwise update; associative and commutative up to round-off.
  void merge(const EnsembleSummary& other);

  std::size_t count() const { return count_; }
  std::size_t size() const { return info_.size(); }
  const std::vector<ObservableInfo>& observables() const { return info_; }
  const ObservableInfo& info(std::size_t i) const { return info_.at(i); }

  /// Index of the observable with this name (and arclengths, when given).
  std::optional<std::size_t> find(const std::string& name) const;
  std::optional<std::size_t> find(const std::string& name, double s, double t) const;
  std::size_t index_of(const std::string& name) const;

  double mean(std::size_t i) const { return mean_.at(i); }
  double m2(std::size_t i) const { return comoment(i, i); }
  double comoment(std::size_t i, std::size_t j) const { return comoment_.at(i * size() + j); }
  double variance(std::size_t i) const;
  double covariance(std::size_t i, std::size_t j) const;
  /// sqrt(M2 / (n (n - 1))).
  double std_error(std::size_t i) const;
  Estimate mean_estimate(std::size_t i) const { return {mean(i), std_error(i)}; }

  /// Unbiased sample covariance of observables x and y, with a delta-method
  /// standard error; `product` must index the per-path observable x*y.
  Estimate covariance_estimate(std::size_t x, std::size_t y, std::size_t product) const;

 private:
  std::vector<ObservableInfo> info_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> comoment_;
  std::vector<double> delta_;
};

// Observable factories. Requested arclengths are snapped to the grid and the
// snapped values are stored in the observable.
Observable tangent_dot(const Grid& grid, double s, double t);
Observable tangent_along_e3(const Grid& grid, double s);
Observable position_sq(const Grid& grid, double s);
Observable position_component(const Grid& grid, int component, double s);

struct EnsembleOptions {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
  /// Paths per accumulation block. Blocks merge in index order, so results do
  /// not depend on the worker count.
  std::size_t block_size = 64;
};

/// Generates n_paths independent paths; path p uses PathStream(seed, p).
EnsembleSummary run_ensemble(const ModelConfig& model, std::size_t n_paths,
                             std::span<const Observable> observables, std::uint64_t seed,
                             EnsembleOptions options = {});

}  // namespace wormchain
