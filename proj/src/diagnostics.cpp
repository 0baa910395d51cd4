#include "wormchain/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wormchain/analytics.hpp"
#include "wormchain/chain.hpp"

namespace wormchain {

ComparisonReport compare(std::string observable, double s, double t, Estimate est, double oracle,
                         double threshold) {
  ComparisonReport r;
  r.observable = std::move(observable);
  r.s = s;
  r.t = t;
  r.estimate = est.value;
  r.std_error = est.std_error;
  r.oracle = oracle;
  r.threshold = threshold;
  r.kind = CheckKind::ZScore;
  return rejudge(r);
}

ComparisonReport upper_bound_check(std::string observable, double s, double t, Estimate est,
                                   double bound) {
  ComparisonReport r;
  r.observable = std::move(observable);
  r.s = s;
  r.t = t;
  r.estimate = est.value;
  r.std_error = est.std_error;
  r.oracle = bound;
  r.threshold = 1.0;
  r.kind = CheckKind::UpperBound;
  return rejudge(r);
}

ComparisonReport rejudge(const ComparisonReport& in) {
  ComparisonReport r = in;
  const double diff = r.estimate - r.oracle;
  if (r.kind == CheckKind::UpperBound) {
    if (r.estimate <= 0.0) {
      r.z = 0.0;
    } else if (r.oracle > 0.0) {
      r.z = r.estimate / r.oracle;
    } else {
      r.z = std::numeric_limits<double>::infinity();
    }
  } else if (std::abs(diff) <= kExactAgreementTol * (1.0 + std::abs(r.oracle))) {
    r.z = 0.0;
  } else if (r.std_error > 0.0) {
    r.z = diff / r.std_error;
  } else {
    r.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  r.pass = std::abs(r.z) <= r.threshold;
  return r;
}

bool all_pass(const std::vector<ComparisonReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

// ---------------------------------------------------------------------------

std::vector<Observable> kp_observables(const Grid& grid,
                                       const std::vector<std::pair<double, double>>& tangent_pairs,
                                       const std::vector<double>& msd_points) {
  std::vector<Observable> obs;
  for (auto [s, t] : tangent_pairs) obs.push_back(tangent_dot(grid, s, t));
  for (double t : msd_points) obs.push_back(position_sq(grid, t));
  return obs;
}

namespace {

std::size_t require(const EnsembleSummary& summary, const std::string& name, double s, double t) {
  auto i = summary.find(name, s, t);
  if (!i) {
    throw std::invalid_argument("summary has no observable " + name + " at (" + std::to_string(s) +
                                ", " + std::to_string(t) + ")");
  }
  return *i;
}

}  // namespace

ComparisonReport estimate_tangent_correlation(const EnsembleSummary& summary, const Grid& grid,
                                              double ell_p, double s, double t, double threshold) {
  const double gs = grid.at(grid.snap(s));
  const double gt = grid.at(grid.snap(t));
  const auto i = require(summary, "Q_s.Q_t", gs, gt);
  return compare("Q_s.Q_t", gs, gt, summary.mean_estimate(i), kp_tangent_correlation(ell_p, gs, gt),
                 threshold);
}

ComparisonReport estimate_msd(const EnsembleSummary& summary, const Grid& grid, double ell_p,
                              double t, double threshold) {
  const double gt = grid.at(grid.snap(t));
  const auto i = require(summary, "|R_s|^2", gt, gt);
  return compare("|R_s|^2", gt, gt, summary.mean_estimate(i), kp_mean_sq_position(ell_p, gt),
                 threshold);
}

std::vector<ComparisonReport> correlation_suite(const KpConfig& cfg, std::size_t n_paths,
                                                std::uint64_t seed, EnsembleOptions options,
                                                double threshold) {
  const double L = cfg.contour_length();
  const std::vector<std::pair<double, double>> pairs{
      {0.0, 0.25 * L}, {0.0, 0.5 * L}, {0.0, L}, {0.5 * L, L}};
  const Grid grid = grid_of(cfg);
  const auto obs = kp_observables(grid, pairs, {});
  const auto summary = run_ensemble(cfg, n_paths, obs, seed, options);
  std::vector<ComparisonReport> out;
  for (auto [s, t] : pairs) {
    out.push_back(estimate_tangent_correlation(summary, grid, cfg.ell_p(), s, t, threshold));
  }
  return out;
}

std::vector<ComparisonReport> msd_suite(const KpConfig& cfg, std::size_t n_paths, std::uint64_t seed,
                                        EnsembleOptions options, double threshold) {
  const double L = cfg.contour_length();
  const std::vector<double> points{0.25 * L, 0.5 * L, L};
  const Grid grid = grid_of(cfg);
  const auto obs = kp_observables(grid, {}, points);
  const auto summary = run_ensemble(cfg, n_paths, obs, seed, options);
  std::vector<ComparisonReport> out;
  for (double t : points) out.push_back(estimate_msd(summary, grid, cfg.ell_p(), t, threshold));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ComparisonReport> frc_oracle_suite(const FrcConfig& cfg, const std::vector<std::size_t>& lags,
                                               std::size_t n_paths, std::uint64_t seed,
                                               EnsembleOptions options, double threshold) {
  cfg.validate();
  const Grid grid = grid_of(cfg);
  std::vector<Observable> obs;
  for (auto k : lags) {
    if (k + 1 > cfg.n_bonds()) throw std::invalid_argument("frc_oracle_suite: lag exceeds chain");
    obs.push_back(tangent_dot(grid, 0.0, grid.at(k)));
  }
  obs.push_back(position_sq(grid, grid.length()));
  const auto summary = run_ensemble(cfg, n_paths, obs, seed, options);

  std::vector<ComparisonReport> out;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    out.push_back(compare("frc_bond_corr", obs[i].s, obs[i].t, summary.mean_estimate(i),
                          frc_bond_correlation_oracle(cfg.bond_angle(), lags[i]), threshold));
  }
  const std::size_t m = lags.size();
  out.push_back(compare("frc_msd", obs[m].s, obs[m].t, summary.mean_estimate(m), frc_msd_oracle(cfg),
                        threshold));
  return out;
}

ConvergenceTable convergence_table(double contour_length, double kappa,
                                   const std::vector<std::size_t>& n_list, std::size_t n_paths,
                                   std::uint64_t seed, EnsembleOptions options, double threshold) {
  if (n_list.empty()) throw std::invalid_argument("convergence_table: empty N list");
  std::vector<std::size_t> ns = n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  for (auto n : ns) {
    if (n < 2) throw std::invalid_argument("convergence_table: every N must be >= 2");
  }

  const double L = contour_length;
  const std::vector<double> points{0.25 * L, 0.5 * L, L};
  ConvergenceTable table;
  std::vector<double> end_gaps;

  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    const std::size_t n = ns[idx];
    const FrcConfig cfg = FrcConfig::scaled(n, L, kappa);
    const double ell_p = cfg.persistence_length();
    const Grid grid = grid_of(cfg);
    const double a = cfg.bond_length();

    std::vector<Observable> obs;
    std::vector<std::size_t> lags;
    std::vector<std::size_t> beads;
    for (double s : points) {
      const std::size_t k = grid.snap(s);
      // Tangent index k is bond k+1, except that the last bead reuses bond N.
      lags.push_back(std::min(k, n - 1));
      beads.push_back(k);
      obs.push_back(tangent_dot(grid, 0.0, grid.at(k)));
    }
    for (double s : points) obs.push_back(position_sq(grid, s));

    // Independent streams per N.
    const auto summary = run_ensemble(cfg, n_paths, obs, mix64(seed ^ mix64(n)), options);
    const std::string tag = "[N=" + std::to_string(n) + "]";

    for (std::size_t p = 0; p < points.size(); ++p) {
      const double s_arc = a * static_cast<double>(lags[p]);
      const double frc = frc_bond_correlation_oracle(cfg.bond_angle(), lags[p]);
      const double kp = kp_tangent_correlation(ell_p, 0.0, s_arc);
      const auto est = summary.mean_estimate(p);
      table.reports.push_back(compare("frc_corr" + tag, 0.0, s_arc, est, frc, threshold));
      table.gaps.push_back({n, s_arc, "corr", frc, kp, std::abs(frc - kp), est.value, est.std_error});
      if (p + 1 == points.size()) end_gaps.push_back(std::abs(frc - kp));
    }
    for (std::size_t p = 0; p < points.size(); ++p) {
      const std::size_t i = points.size() + p;
      const std::size_t k = beads[p];
      const double s_arc = grid.at(k);
      const double frc = k == 0 ? 0.0 : frc_msd_oracle(FrcConfig::raw(k, a, cfg.bond_angle()));
      const double kp = kp_mean_sq_position(ell_p, s_arc);
      const auto est = summary.mean_estimate(i);
      table.reports.push_back(compare("frc_msd" + tag, s_arc, s_arc, est, frc, threshold));
      table.gaps.push_back({n, s_arc, "msd", frc, kp, std::abs(frc - kp), est.value, est.std_error});
    }
  }

  // Largest increase of the end-to-end correlation gap between consecutive N.
  double worst_increase = 0.0;
  for (std::size_t i = 1; i < end_gaps.size(); ++i) {
    worst_increase = std::max(worst_increase, end_gaps[i] - end_gaps[i - 1]);
  }
  const double smallest = *std::min_element(end_gaps.begin(), end_gaps.end());
  table.reports.push_back(upper_bound_check("kp_gap_monotone", 0.0, L, {worst_increase, 0.0},
                                            kGapMonotoneSlack * smallest));
  return table;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> eval_points(double contour_length, std::size_t grid_points) {
  if (grid_points == 0) throw std::invalid_argument("grid_points must be >= 1");
  std::vector<double> pts;
  for (std::size_t j = 1; j <= grid_points; ++j) {
    pts.push_back(contour_length * static_cast<double>(j) / static_cast<double>(grid_points));
  }
  return pts;
}

Observable scalar(std::string name, double s, std::vector<std::size_t> idx,
                  std::function<double(std::span<const Snapshot>)> f) {
  return {std::move(name), s, s, std::move(idx), std::move(f)};
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

DiagnosticsTable hard_rod_diagnostics(double ell_p, double contour_length, std::size_t n_paths,
                                      std::size_t grid_points, std::uint64_t seed,
                                      EnsembleOptions options, double threshold, std::size_t n_steps) {
  require_positive(ell_p, "ell_p");
  require_positive(contour_length, "contour length");
  DiagnosticsTable table;
  if (ell_p < 100.0 * contour_length) {
    table.warnings.push_back("hard-rod diagnostics expect ell_p >= 100 L; got ell_p = " +
                             std::to_string(ell_p) + ", L = " + std::to_string(contour_length));
  }
  const KpConfig cfg(contour_length, ell_p, n_steps);
  const Grid grid = grid_of(cfg);
  const double scale = std::sqrt(ell_p);

  struct Point {
    double s;
    std::size_t x[3];
    std::size_t sq[3];
  };
  std::vector<Observable> obs;
  std::vector<Point> layout;
  for (double req : eval_points(contour_length, grid_points)) {
    const std::size_t k = grid.snap(req);
    const double s = grid.at(k);
    Point p{s, {}, {}};
    for (int c = 0; c < 3; ++c) {
      auto dev = [c, s, scale](const Snapshot& v) {
        return scale * (v.position[c] - (c == 2 ? s : 0.0));
      };
      p.x[c] = obs.size();
      obs.push_back(scalar("W^" + std::to_string(c + 1), s, {k},
                           [dev](std::span<const Snapshot> v) { return dev(v[0]); }));
      p.sq[c] = obs.size();
      obs.push_back(scalar("W^" + std::to_string(c + 1) + "^2", s, {k}, [dev](std::span<const Snapshot> v) {
        const double d = dev(v[0]);
        return d * d;
      }));
    }
    layout.push_back(p);
  }
  std::vector<std::size_t> all(grid.n_steps + 1);
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  const std::size_t sup_index = obs.size();
  obs.push_back(scalar("sup|R_s-s*e3|", contour_length, std::move(all), [](std::span<const Snapshot> v) {
    double best = 0.0;
    for (const auto& snap : v) best = std::max(best, (snap.position - snap.s * e3()).norm());
    return best;
  }));

  const auto summary = run_ensemble(cfg, n_paths, obs, seed, options);
  for (const auto& p : layout) {
    const double oracle = hard_rod_fluctuation_cov(p.s, p.s);
    Estimate var[3];
    for (int c = 0; c < 3; ++c) var[c] = summary.covariance_estimate(p.x[c], p.x[c], p.sq[c]);
    table.reports.push_back(compare("hard_rod_var1", p.s, p.s, var[0], oracle, threshold));
    table.reports.push_back(compare("hard_rod_var2", p.s, p.s, var[1], oracle, threshold));
    const double transverse = 0.5 * (var[0].value + var[1].value);
    const double ratio = transverse > 0.0 ? var[2].value / transverse : std::numeric_limits<double>::infinity();
    table.reports.push_back(
        upper_bound_check("hard_rod_axial_ratio", p.s, p.s, {ratio, 0.0}, kHardRodAxialRatioBound));
  }
  table.reports.push_back(upper_bound_check("hard_rod_sup_dev", 0.0, contour_length,
                                            summary.mean_estimate(sup_index), kHardRodSupBound));
  return table;
}

DiagnosticsTable random_coil_diagnostics(double ell_p, double contour_length, std::size_t n_paths,
                                         std::size_t grid_points, std::uint64_t seed,
                                         EnsembleOptions options, double threshold,
                                         std::size_t n_steps) {
  require_positive(ell_p, "ell_p");
  require_positive(contour_length, "contour length");
  DiagnosticsTable table;
  if (ell_p > contour_length / 100.0) {
    table.warnings.push_back("random-coil diagnostics expect ell_p <= L/100; got ell_p = " +
                             std::to_string(ell_p) + ", L = " + std::to_string(contour_length));
  }
  const KpConfig cfg(contour_length, ell_p, n_steps);
  const Grid grid = grid_of(cfg);
  const double scale = std::sqrt(3.0 / ell_p);

  struct Point {
    double s;
    double half;
    std::size_t x[3], sq[3], cross[3], xh[3], d[3], dxh[3], norm2;
  };
  auto add = [&](std::vector<Observable>& obs, std::string name, double s, std::vector<std::size_t> idx,
                 std::function<double(std::span<const Snapshot>)> f) {
    obs.push_back(scalar(std::move(name), s, std::move(idx), std::move(f)));
    return obs.size() - 1;
  };

  std::vector<Observable> obs;
  std::vector<Point> layout;
  constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (double req : eval_points(contour_length, grid_points)) {
    const std::size_t k = grid.snap(req);
    const std::size_t kh = grid.snap(0.5 * grid.at(k));
    Point p{};
    p.s = grid.at(k);
    p.half = grid.at(kh);
    for (int c = 0; c < 3; ++c) {
      const std::string comp = std::to_string(c + 1);
      p.x[c] = add(obs, "X^" + comp, p.s, {k},
                   [c, scale](std::span<const Snapshot> v) { return scale * v[0].position[c]; });
      p.sq[c] = add(obs, "X^" + comp + "^2", p.s, {k}, [c, scale](std::span<const Snapshot> v) {
        const double x = scale * v[0].position[c];
        return x * x;
      });
      p.xh[c] = add(obs, "X^" + comp + "(s/2)", p.s, {kh},
                    [c, scale](std::span<const Snapshot> v) { return scale * v[0].position[c]; });
      p.d[c] = add(obs, "dX^" + comp, p.s, {k, kh}, [c, scale](std::span<const Snapshot> v) {
        return scale * (v[0].position[c] - v[1].position[c]);
      });
      p.dxh[c] = add(obs, "dX^" + comp + "*X^" + comp + "(s/2)", p.s, {k, kh},
                     [c, scale](std::span<const Snapshot> v) {
                       return scale * (v[0].position[c] - v[1].position[c]) * scale * v[1].position[c];
                     });
    }
    for (int q = 0; q < 3; ++q) {
      const int i = kPairs[q][0];
      const int j = kPairs[q][1];
      p.cross[q] = add(obs, "X^" + std::to_string(i + 1) + "X^" + std::to_string(j + 1), p.s, {k},
                       [i, j, scale](std::span<const Snapshot> v) {
                         return scale * v[0].position[i] * scale * v[0].position[j];
                       });
    }
    p.norm2 = add(obs, "|X|^2", p.s, {k},
                  [scale](std::span<const Snapshot> v) { return scale * scale * v[0].position.squaredNorm(); });
    layout.push_back(p);
  }

  const auto summary = run_ensemble(cfg, n_paths, obs, seed, options);
  for (const auto& p : layout) {
    for (int c = 0; c < 3; ++c) {
      table.reports.push_back(compare("coil_var" + std::to_string(c + 1), p.s, p.s,
                                      summary.covariance_estimate(p.x[c], p.x[c], p.sq[c]),
                                      random_coil_cov(p.s, p.s), threshold));
    }
    for (int q = 0; q < 3; ++q) {
      const int i = kPairs[q][0];
      const int j = kPairs[q][1];
      table.reports.push_back(compare("coil_cov" + std::to_string(i + 1) + std::to_string(j + 1), p.s, p.s,
                                      summary.covariance_estimate(p.x[i], p.x[j], p.cross[q]), 0.0,
                                      threshold));
    }
    for (int c = 0; c < 3; ++c) {
      table.reports.push_back(compare("coil_increment_cov" + std::to_string(c + 1), p.half, p.s,
                                      summary.covariance_estimate(p.d[c], p.xh[c], p.dxh[c]), 0.0,
                                      threshold));
    }
    table.reports.push_back(compare("coil_scaled_msd", p.s, p.s, summary.mean_estimate(p.norm2),
                                    3.0 / ell_p * kp_mean_sq_position(ell_p, p.s), threshold));
  }
  return table;
}

// ---------------------------------------------------------------------------

SuiteOutcome run_with_rerun(const std::function<DiagnosticsTable(std::uint64_t)>& suite,
                            std::uint64_t seed) {
  SuiteOutcome out;
  for (unsigned attempt = 0; attempt < 2; ++attempt) {
    const std::uint64_t s = rerun_seed(seed, attempt);
    auto table = suite(s);
    out.reports = std::move(table.reports);
    out.warnings = std::move(table.warnings);
    out.attempts = attempt + 1;
    out.seed_used = s;
    out.passed = all_pass(out.reports);
    if (out.passed) break;
  }
  return out;
}

}  // namespace wormchain
