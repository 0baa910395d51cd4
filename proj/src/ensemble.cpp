#include "wormchain/ensemble.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace wormchain {

std::size_t Grid::snap(double s) const {
  const double len = length();
  const double slack = 1e-9 * std::max(1.0, len);
  if (!(s >= -slack && s <= len + slack)) {
    throw std::invalid_argument("arclength " + std::to_string(s) + " outside [0, " +
                                std::to_string(len) + "]");
  }
  const double k = std::round(std::clamp(s, 0.0, len) / step);
  return std::min(static_cast<std::size_t>(k), n_steps);
}

Grid grid_of(const ModelConfig& model) {
  return std::visit(
      [](const auto& cfg) -> Grid {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, FrcConfig>) {
          return {cfg.bond_length(), cfg.n_bonds()};
        } else {
          return {cfg.step(), cfg.n_steps()};
        }
      },
      model);
}

// ---------------------------------------------------------------------------

EnsembleSummary::EnsembleSummary(std::vector<ObservableInfo> info)
    : info_(std::move(info)),
      mean_(info_.size(), 0.0),
      comoment_(info_.size() * info_.size(), 0.0),
      delta_(info_.size(), 0.0) {}

void EnsembleSummary::add(std::span<const double> values) {
  const std::size_t k = size();
  if (values.size() != k) throw std::invalid_argument("EnsembleSummary::add: wrong number of values");
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < k; ++i) {
    delta_[i] = values[i] - mean_[i];
    mean_[i] += delta_[i] / n;
  }
  // C_ij += delta_i (x_j - mean_j(new)) = delta_i delta_j (n-1)/n
  const double w = (n - 1.0) / n;
  for (std::size_t i = 0; i < k; ++i) {
    const double di = delta_[i] * w;
    double* row = &comoment_[i * k];
    for (std::size_t j = 0; j < k; ++j) row[j] += di * delta_[j];
  }
}

void EnsembleSummary::merge(const EnsembleSummary& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const std::size_t k = size();
  if (other.size() != k) throw std::invalid_argument("EnsembleSummary::merge: observable mismatch");
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t i = 0; i < k; ++i) delta_[i] = other.mean_[i] - mean_[i];
  const double w = na * nb / n;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      comoment_[i * k + j] += other.comoment_[i * k + j] + w * delta_[i] * delta_[j];
    }
  }
  for (std::size_t i = 0; i < k; ++i) mean_[i] += delta_[i] * (nb / n);
  count_ += other.count_;
}

std::optional<std::size_t> EnsembleSummary::find(const std::string& name) const {
  for (std::size_t i = 0; i < info_.size(); ++i) {
    if (info_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> EnsembleSummary::find(const std::string& name, double s, double t) const {
  constexpr double kTol = 1e-12;
  for (std::size_t i = 0; i < info_.size(); ++i) {
    const auto& o = info_[i];
    if (o.name == name && std::abs(o.s - s) <= kTol * std::max(1.0, std::abs(s)) &&
        std::abs(o.t - t) <= kTol * std::max(1.0, std::abs(t))) {
      return i;
    }
  }
  return std::nullopt;
}

std::size_t EnsembleSummary::index_of(const std::string& name) const {
  auto i = find(name);
  if (!i) throw std::invalid_argument("no observable named " + name);
  return *i;
}

double EnsembleSummary::variance(std::size_t i) const { return covariance(i, i); }

double EnsembleSummary::covariance(std::size_t i, std::size_t j) const {
  if (count_ < 2) return 0.0;
  return comoment(i, j) / static_cast<double>(count_ - 1);
}

double EnsembleSummary::std_error(std::size_t i) const {
  if (count_ < 2) return 0.0;
  const double n = static_cast<double>(count_);
  return std::sqrt(std::max(0.0, m2(i)) / (n * (n - 1.0)));
}

Estimate EnsembleSummary::covariance_estimate(std::size_t x, std::size_t y, std::size_t product) const {
  if (count_ < 2) return {};
  const double n = static_cast<double>(count_);
  const double bessel = n / (n - 1.0);
  const double value = bessel * (mean(product) - mean(x) * mean(y));
  // Gradient of (p, x, y) -> p - x y; identical indices collapse.
  std::array<std::size_t, 3> idx{product, x, y};
  std::array<double, 3> grad{1.0, -mean(y), -mean(x)};
  double var = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) var += grad[a] * grad[b] * covariance(idx[a], idx[b]);
  }
  return {value, bessel * std::sqrt(std::max(0.0, var) / n)};
}

// ---------------------------------------------------------------------------

Observable tangent_dot(const Grid& grid, double s, double t) {
  const std::size_t i = grid.snap(s);
  const std::size_t j = grid.snap(t);
  return {"Q_s.Q_t", grid.at(i), grid.at(j), {i, j},
          [](std::span<const Snapshot> v) { return v[0].tangent.dot(v[1].tangent); }};
}

Observable tangent_along_e3(const Grid& grid, double s) {
  const std::size_t i = grid.snap(s);
  return {"Q_s.e3", grid.at(i), grid.at(i), {i},
          [](std::span<const Snapshot> v) { return v[0].tangent.z(); }};
}

Observable position_sq(const Grid& grid, double s) {
  const std::size_t i = grid.snap(s);
  return {"|R_s|^2", grid.at(i), grid.at(i), {i},
          [](std::span<const Snapshot> v) { return v[0].position.squaredNorm(); }};
}

Observable position_component(const Grid& grid, int component, double s) {
  if (component < 1 || component > 3) throw std::invalid_argument("component must be 1, 2 or 3");
  const std::size_t i = grid.snap(s);
  const int c = component - 1;
  return {"R^" + std::to_string(component) + "_s", grid.at(i), grid.at(i), {i},
          [c](std::span<const Snapshot> v) { return v[0].position[c]; }};
}

// ---------------------------------------------------------------------------

namespace {

/// Grid indices needed by any observable, sorted and unique.
std::vector<std::size_t> needed_indices(std::span<const Observable> observables, std::size_t n_steps) {
  std::vector<std::size_t> out;
  for (const auto& o : observables) {
    for (auto k : o.indices) {
      if (k > n_steps) throw std::invalid_argument("observable " + o.name + " reads beyond the grid");
      out.push_back(k);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

class PathEvaluator {
 public:
  PathEvaluator(const ModelConfig& model, std::span<const Observable> observables)
      : model_(model), observables_(observables) {
    const Grid g = grid_of(model);
    needed_ = needed_indices(observables, g.n_steps);
    slots_.reserve(observables.size());
    for (const auto& o : observables) {
      std::vector<std::size_t> slot;
      for (auto k : o.indices) {
        slot.push_back(static_cast<std::size_t>(
            std::lower_bound(needed_.begin(), needed_.end(), k) - needed_.begin()));
      }
      slots_.push_back(std::move(slot));
    }
    snaps_.resize(needed_.size());
  }

  void evaluate(std::uint64_t seed, std::uint64_t path, std::span<double> out) {
    PathStream rng(seed, path);
    std::visit([&](const auto& cfg) { record(cfg, rng); }, model_);
    for (std::size_t o = 0; o < observables_.size(); ++o) {
      gathered_.clear();
      for (auto slot : slots_[o]) gathered_.push_back(snaps_[slot]);
      out[o] = observables_[o].eval(gathered_);
    }
  }

 private:
  void record(const FrcConfig& cfg, PathStream& rng) {
    const DiscreteChain chain = sample_frc(cfg, rng);
    const std::size_t n = chain.n_bonds();
    const double a = chain.bond_length;
    for (std::size_t i = 0; i < needed_.size(); ++i) {
      const std::size_t k = needed_[i];
      const std::size_t bond = std::min(k + 1, n);
      snaps_[i] = {a * static_cast<double>(k), chain.bond(bond) / a, chain.beads[k]};
    }
  }

  void record(const KpConfig& cfg, PathStream& rng) {
    KpIntegrator integ(cfg);
    std::size_t next = 0;
    auto take = [&] {
      while (next < needed_.size() && needed_[next] == integ.index()) {
        snaps_[next++] = {integ.arclength(), integ.tangent(), integ.position()};
      }
    };
    take();
    const double sd = std::sqrt(cfg.step());
    const std::size_t last = needed_.empty() ? 0 : needed_.back();
    for (std::size_t k = 0; k < last; ++k) {
      const double d1 = sd * rng.normal();
      const double d2 = sd * rng.normal();
      integ.advance(d1, d2);
      take();
    }
  }

  const ModelConfig& model_;
  std::span<const Observable> observables_;
  std::vector<std::size_t> needed_;
  std::vector<std::vector<std::size_t>> slots_;
  std::vector<Snapshot> snaps_;
  std::vector<Snapshot> gathered_;
};

}  // namespace

EnsembleSummary run_ensemble(const ModelConfig& model, std::size_t n_paths,
                             std::span<const Observable> observables, std::uint64_t seed,
                             EnsembleOptions options) {
  if (n_paths < 2) throw std::invalid_argument("run_ensemble: n_paths must be >= 2");
  if (observables.empty()) throw std::invalid_argument("run_ensemble: no observables");
  std::visit([](const auto& cfg) {
    if constexpr (std::is_same_v<std::decay_t<decltype(cfg)>, FrcConfig>) cfg.validate();
  }, model);
  for (const auto& o : observables) {
    if (!o.eval) throw std::invalid_argument("observable " + o.name + " has no evaluator");
  }

  std::vector<ObservableInfo> info;
  info.reserve(observables.size());
  for (const auto& o : observables) info.push_back({o.name, o.s, o.t});

  const std::size_t block = std::max<std::size_t>(1, options.block_size);
  const std::size_t n_blocks = (n_paths + block - 1) / block;
  std::vector<EnsembleSummary> blocks(n_blocks, EnsembleSummary(info));

  unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, n_blocks));

  std::atomic<std::size_t> next_block{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      PathEvaluator eval(model, observables);
      std::vector<double> values(observables.size());
      for (std::size_t b = next_block++; b < n_blocks; b = next_block++) {
        const std::size_t end = std::min(n_paths, (b + 1) * block);
        for (std::size_t p = b * block; p < end; ++p) {
          eval.evaluate(seed, p, values);
          blocks[b].add(values);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_block = n_blocks;
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  EnsembleSummary total(info);
  for (const auto& b : blocks) total.merge(b);
  return total;
}

}  // namespace wormchain
