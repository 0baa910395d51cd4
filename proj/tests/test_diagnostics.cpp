#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "wormchain/analytics.hpp"
#include "wormchain/diagnostics.hpp"

using namespace wormchain;

namespace {

SuiteOutcome rerun(const std::function<std::vector<ComparisonReport>(std::uint64_t)>& f, std::uint64_t seed) {
  return run_with_rerun([&](std::uint64_t s) { return DiagnosticsTable{f(s), {}}; }, seed);
}

const ComparisonReport& row(const std::vector<ComparisonReport>& rs, const std::string& name, double s) {
  for (const auto& r : rs) {
    if (r.observable == name && std::abs(r.s - s) < 1e-12) return r;
  }
  FAIL("missing row " << name);
  return rs.front();
}

}  // namespace

TEST_CASE("z-score judgement") {
  auto r = compare("x", 0, 1, {1.2, 0.1}, 1.0);
  CHECK(r.z == doctest::Approx(2.0));
  CHECK(r.pass);
  CHECK_FALSE(compare("x", 0, 1, {1.5, 0.1}, 1.0).pass);
  CHECK(compare("x", 0, 1, {1.4, 0.1}, 1.0, 4.0).pass);
  CHECK_FALSE(compare("x", 0, 1, {1.41, 0.1}, 1.0, 4.0).pass);
  SUBCASE("deterministic estimates") {
    auto exact = compare("x", 0, 0, {1.0, 0.0}, 1.0);
    CHECK(exact.z == 0.0);
    CHECK(exact.pass);
    auto off = compare("x", 0, 0, {1.1, 0.0}, 1.0);
    CHECK(std::isinf(off.z));
    CHECK_FALSE(off.pass);
  }
}

TEST_CASE("upper-bound judgement") {
  CHECK(upper_bound_check("b", 0, 1, {0.01, 0.0}, 0.05).pass);
  CHECK(upper_bound_check("b", 0, 1, {0.05, 0.0}, 0.05).pass);
  CHECK_FALSE(upper_bound_check("b", 0, 1, {0.06, 0.0}, 0.05).pass);
  CHECK(upper_bound_check("b", 0, 1, {0.0, 0.0}, 0.0).pass);
  CHECK_FALSE(upper_bound_check("b", 0, 1, {1e-3, 0.0}, 0.0).pass);
}

TEST_CASE("pass flags are reproducible from the report fields") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    ComparisonReport r = i % 3 == 0 ? upper_bound_check("b", 0, 1, {u(rng), 0.0}, u(rng))
                                    : compare("x", 0, 1, {g(rng), u(rng)}, g(rng), 1 + 4 * u(rng));
    ComparisonReport tampered = r;
    tampered.pass = !r.pass;
    tampered.z = 123.0;
    CHECK(rejudge(tampered).pass == r.pass);
    CHECK(rejudge(tampered).z == r.z);
    CHECK(r.pass == (std::abs(r.z) <= r.threshold));
  }
}

TEST_CASE("continuum chain suites") {
  KpConfig cfg(1.0, 1.0, 200);
  auto corr = rerun([&](std::uint64_t s) { return correlation_suite(cfg, 4000, s); }, 10);
  CHECK(corr.passed);
  CHECK(corr.reports.size() == 4);
  auto msd = rerun([&](std::uint64_t s) { return msd_suite(cfg, 4000, s); }, 11);
  CHECK(msd.passed);
  CHECK(msd.reports.size() == 3);
  CHECK(row(msd.reports, "|R_s|^2", 1.0).oracle == doctest::Approx(0.5676676).epsilon(1e-7));
}

TEST_CASE("equal arclengths give exact correlation one") {
  KpConfig cfg(1.0, 1.0, 100);
  Grid g = grid_of(cfg);
  auto obs = kp_observables(g, {{0.5, 0.5}}, {0.0});
  EnsembleSummary s = run_ensemble(cfg, 10, obs, 1);
  auto r = estimate_tangent_correlation(s, g, 1.0, 0.5, 0.5);
  CHECK(r.pass);
  CHECK(r.z == 0.0);
  CHECK(estimate_msd(s, g, 1.0, 0.0).pass);
  CHECK_THROWS_AS(estimate_msd(s, g, 1.0, 0.7), std::invalid_argument);
}

TEST_CASE("discrete chain oracle suite") {
  const auto cfg = FrcConfig::scaled(100, 1.0, std::sqrt(2.0));
  auto out = rerun([&](std::uint64_t s) { return frc_oracle_suite(cfg, {1, 5, 25}, 4000, s); }, 12);
  CHECK(out.passed);
  REQUIRE(out.reports.size() == 4);
  CHECK(out.reports[2].oracle == doctest::Approx(std::pow(std::cos(cfg.bond_angle()), 25)));
  CHECK(out.reports[3].observable == "frc_msd");
  CHECK_THROWS_AS(frc_oracle_suite(cfg, {100}, 10, 1), std::invalid_argument);
}

TEST_CASE("convergence table") {
  const double kappa = std::sqrt(2.0);
  auto table = convergence_table(1.0, kappa, {4, 16, 64}, 2000, 13);
  // Two observables at three arclengths per N, plus the monotonicity row.
  CHECK(table.reports.size() == 3 * 6 + 1);
  CHECK(table.gaps.size() == 3 * 6);
  for (const auto& g : table.gaps) {
    CHECK(g.gap == doctest::Approx(std::abs(g.frc_oracle - g.kp_closed_form)));
    if (g.observable == "corr" && g.s == 1.0) {
      const double th = kappa / std::sqrt(static_cast<double>(g.n_bonds));
      CHECK(g.frc_oracle == doctest::Approx(std::pow(std::cos(th), static_cast<double>(g.n_bonds - 1))));
      CHECK(g.kp_closed_form == doctest::Approx(std::exp(-2.0)));
    }
  }
  CHECK(table.reports.back().observable == "kp_gap_monotone");
  CHECK(table.reports.back().pass);
  CHECK_THROWS_AS(convergence_table(1.0, kappa, {}, 10, 1), std::invalid_argument);
}

TEST_CASE("stiff-limit diagnostics") {
  auto d = hard_rod_diagnostics(1e4, 1.0, 2000, 2, 14, {}, kDefaultZThreshold, 200);
  CHECK(d.warnings.empty());
  CHECK(row(d.reports, "hard_rod_axial_ratio", 1.0).pass);
  CHECK(row(d.reports, "hard_rod_sup_dev", 0.0).pass);
  // With the tangent generator Laplacian/ell_p, the driver coefficient is
  // sqrt(2/ell_p), so sqrt(ell_p) R^1_s tends to sqrt(2) W_s: variance
  // 2 s^3/3, twice the integrated Brownian motion covariance.
  for (double s : {0.5, 1.0}) {
    for (const char* name : {"hard_rod_var1", "hard_rod_var2"}) {
      const auto& r = row(d.reports, name, s);
      CHECK(r.oracle == doctest::Approx(hard_rod_fluctuation_cov(s, s)));
      CHECK(std::abs(r.estimate - 2 * hard_rod_fluctuation_cov(s, s)) <= 4 * r.std_error);
    }
  }
  auto soft = hard_rod_diagnostics(10.0, 1.0, 10, 1, 1, {}, kDefaultZThreshold, 100);
  CHECK(soft.warnings.size() == 1);
}

TEST_CASE("flexible-limit diagnostics") {
  auto out = run_with_rerun(
      [](std::uint64_t s) { return random_coil_diagnostics(0.01, 1.0, 400, 1, s); }, 15);
  CHECK(out.passed);
  CHECK(out.warnings.empty());
  for (const char* name : {"coil_var1", "coil_var2", "coil_var3", "coil_cov12", "coil_cov13", "coil_cov23",
                           "coil_scaled_msd"}) {
    CHECK(row(out.reports, name, 1.0).observable == name);
  }
  CHECK(row(out.reports, "coil_var1", 1.0).oracle == 1.0);
  CHECK(row(out.reports, "coil_scaled_msd", 1.0).oracle ==
        doctest::Approx(300.0 * kp_mean_sq_position(0.01, 1.0)));
  auto stiff = random_coil_diagnostics(1.0, 1.0, 10, 1, 1, {}, kDefaultZThreshold, 100);
  CHECK(stiff.warnings.size() == 1);
}

TEST_CASE("rerun policy") {
  auto pass_on = [](std::uint64_t good) {
    return [good](std::uint64_t s) {
      return DiagnosticsTable{{compare("x", 0, 0, {s == good ? 0.0 : 1.0, 0.0}, 0.0)}, {}};
    };
  };
  auto first = run_with_rerun(pass_on(7), 7);
  CHECK(first.passed);
  CHECK(first.attempts == 1);
  CHECK(first.seed_used == 7);
  auto second = run_with_rerun(pass_on(rerun_seed(7, 1)), 7);
  CHECK(second.passed);
  CHECK(second.attempts == 2);
  CHECK(second.seed_used == rerun_seed(7, 1));
  auto never = run_with_rerun(pass_on(0), 7);
  CHECK_FALSE(never.passed);
  CHECK(never.attempts == 2);
  CHECK(rerun_seed(7, 0) == 7);
  CHECK(rerun_seed(7, 1) != 7);
}
