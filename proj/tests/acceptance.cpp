// Acceptance suite. One criterion per invocation (`acceptance 3`), or all of
// them with no argument. Prints one PASS/FAIL line per criterion and exits
// non-zero if any selected criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wormchain/analytics.hpp"
#include "wormchain/chain.hpp"
#include "wormchain/cli.hpp"
#include "wormchain/diagnostics.hpp"
#include "wormchain/ensemble.hpp"
#include "wormchain/io.hpp"
#include "wormchain/kp.hpp"

using namespace wormchain;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr double kZ = 4.0;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
};

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

std::string describe(const ComparisonReport& r) {
  return fmt("%s s=%g t=%g estimate=%.7g stderr=%.3g oracle=%.7g z=%.3g", r.observable.c_str(), r.s, r.t,
             r.estimate, r.std_error, r.oracle, r.z);
}

void check_reports(Outcome& o, const std::vector<ComparisonReport>& rs) {
  for (const auto& r : rs) o.check(r.pass, describe(r));
}

double bond_angle_between(const Vec3& p, const Vec3& q) { return std::atan2(p.cross(q).norm(), p.dot(q)); }

// Composite 5-point Gauss-Legendre on [a, b].
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels = 64) {
  static constexpr std::array<double, 5> x{0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640,
                                           -0.9061798459386640};
  static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                           0.2369268850561891, 0.2369268850561891};
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (int i = 0; i < 5; ++i) sum += w[i] * f(mid + 0.5 * width * x[i]);
  }
  return 0.5 * width * sum;
}

// --- 1 ---------------------------------------------------------------------

Outcome construction_exactness() {
  Outcome o;
  const auto cfg = FrcConfig::scaled(1000, 1.0, std::sqrt(2.0));
  double worst_len = 0.0, worst_angle = 0.0;
  for (std::uint64_t p = 0; p < 100; ++p) {
    PathStream rng(kSeed, p);
    DiscreteChain c = sample_frc(cfg, rng);
    for (std::size_t n = 1; n <= cfg.n_bonds(); ++n) {
      worst_len = std::max(worst_len, std::abs(c.bond(n).norm() - cfg.bond_length()) / cfg.bond_length());
      if (n < cfg.n_bonds()) {
        worst_angle = std::max(worst_angle, std::abs(bond_angle_between(c.bond(n), c.bond(n + 1)) - cfg.bond_angle()));
      }
    }
  }
  o.check(worst_len <= 1e-12, fmt("max relative bond length error %.3g <= 1e-12", worst_len));
  o.check(worst_angle <= 1e-10, fmt("max bond angle error %.3g <= 1e-10", worst_angle));
  return o;
}

// --- 2 ---------------------------------------------------------------------

Outcome frc_oracles() {
  Outcome o;
  const auto cfg = FrcConfig::scaled(1000, 1.0, std::sqrt(2.0));
  auto out = run_with_rerun(
      [&](std::uint64_t s) { return DiagnosticsTable{frc_oracle_suite(cfg, {1, 5, 25}, 10'000, s, {}, kZ), {}}; },
      kSeed);
  o.notes.push_back(fmt("  attempts %u", out.attempts));
  check_reports(o, out.reports);
  return o;
}

// --- 3, 4 --------------------------------------------------------------------

std::vector<ComparisonReport> kp_unit_ensemble(std::uint64_t seed) {
  KpConfig cfg(1.0, 1.0, 1000);
  Grid g = grid_of(cfg);
  auto obs = kp_observables(g, {{0.0, 0.25}, {0.0, 0.5}, {0.0, 1.0}}, {1.0});
  EnsembleSummary s = run_ensemble(cfg, 10'000, obs, seed);
  std::vector<ComparisonReport> rs;
  for (double t : {0.25, 0.5, 1.0}) rs.push_back(estimate_tangent_correlation(s, g, 1.0, 0.0, t, kZ));
  rs.push_back(estimate_msd(s, g, 1.0, 1.0, kZ));
  return rs;
}

Outcome tangent_correlation() {
  Outcome o;
  const std::array<double, 3> s{0.25, 0.5, 1.0}, pinned{0.6065307, 0.3678794, 0.1353353};
  for (int i = 0; i < 3; ++i) {
    const double oracle = kp_tangent_correlation(1.0, 0.0, s[i]);
    o.check(std::abs(oracle - pinned[i]) <= 5e-8 && std::abs(oracle - std::exp(-2.0 * s[i])) <= 1e-15,
            fmt("oracle at s=%g is %.7f", s[i], oracle));
  }
  auto out = run_with_rerun(
      [](std::uint64_t seed) {
        auto rs = kp_unit_ensemble(seed);
        rs.pop_back();
        return DiagnosticsTable{rs, {}};
      },
      kSeed);
  o.notes.push_back(fmt("  attempts %u", out.attempts));
  check_reports(o, out.reports);
  return o;
}

Outcome mean_square_position() {
  Outcome o;
  const double oracle = kp_mean_sq_position(1.0, 1.0);
  o.check(std::abs(oracle - 0.5676676) <= 5e-8, fmt("oracle E|R_1|^2 = %.7f", oracle));
  auto out = run_with_rerun(
      [](std::uint64_t seed) { return DiagnosticsTable{{kp_unit_ensemble(seed).back()}, {}}; }, kSeed);
  o.notes.push_back(fmt("  attempts %u", out.attempts));
  check_reports(o, out.reports);
  double worst = 0.0;
  for (double ell_p : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    for (double t : {0.25, 0.5, 1.0, 2.0}) {
      const double quad = 2.0 * gauss_legendre(
                                    [&](double v) {
                                      return gauss_legendre(
                                          [&](double u) { return kp_tangent_correlation(ell_p, u, v); }, 0.0, v);
                                    },
                                    0.0, t);
      worst = std::max(worst, std::abs(quad - kp_mean_sq_position(ell_p, t)));
    }
  }
  o.check(worst <= 1e-8, fmt("quadrature identity max error %.3g <= 1e-8", worst));
  return o;
}

// --- 5 ---------------------------------------------------------------------

Outcome convergence() {
  Outcome o;
  const double kappa = std::sqrt(2.0);
  const std::vector<std::size_t> ns{100, 1000, 10000};
  double prev = INFINITY;
  for (std::size_t n : ns) {
    const double gap =
        std::abs(std::pow(std::cos(kappa / std::sqrt(static_cast<double>(n))), static_cast<double>(n - 1)) -
                 std::exp(-2.0));
    o.check(gap < prev, fmt("N=%zu closed-form gap %.6f decreases", n, gap));
    prev = gap;
  }
  std::vector<GapRow> gaps;
  auto out = run_with_rerun(
      [&](std::uint64_t s) {
        auto t = convergence_table(1.0, kappa, ns, 10'000, s, {}, kZ);
        gaps = t.gaps;
        return DiagnosticsTable{t.reports, {}};
      },
      kSeed);
  o.notes.push_back(fmt("  attempts %u", out.attempts));
  check_reports(o, out.reports);
  for (const auto& g : gaps) {
    o.notes.push_back(fmt("  gap N=%zu s=%g %s frc=%.6f kp=%.6f gap=%.6f", g.n_bonds, g.s, g.observable.c_str(),
                          g.frc_oracle, g.kp_closed_form, g.gap));
  }
  return o;
}

// --- 6 ---------------------------------------------------------------------

Outcome hard_rod() {
  Outcome o;
  // Brute-force oracle: Var of integrated Brownian motion at s = 1.
  {
    const int paths = 100'000, steps = 200;
    const double h = 1.0 / steps;
    std::mt19937_64 rng(kSeed);
    std::normal_distribution<double> g(0.0, std::sqrt(h));
    double s1 = 0, s2 = 0, s4 = 0;
    std::vector<double> w(paths);
    for (int p = 0; p < paths; ++p) {
      double beta = 0, acc = 0;
      for (int k = 0; k < steps; ++k) {
        const double next = beta + g(rng);
        acc += 0.5 * h * (beta + next);
        beta = next;
      }
      w[p] = acc;
      s1 += acc;
    }
    const double m = s1 / paths;
    for (double x : w) {
      s2 += (x - m) * (x - m);
      s4 += std::pow(x - m, 4);
    }
    const double var = s2 / (paths - 1);
    const double se = std::sqrt((s4 / paths - var * var) / paths);
    const double oracle = hard_rod_fluctuation_cov(1.0, 1.0);
    o.check(std::abs(var - oracle) <= kZ * se,
            fmt("integrated-BM brute force Var(W_1)=%.5f vs %.5f (z=%.2f)", var, oracle, (var - oracle) / se));
  }
  auto out = run_with_rerun(
      [](std::uint64_t s) { return hard_rod_diagnostics(1e4, 1.0, 10'000, 4, s, {}, kZ); }, kSeed);
  o.notes.push_back(fmt("  attempts %u", out.attempts));
  for (const auto& w : out.warnings) o.notes.push_back("  warning: " + w);
  check_reports(o, out.reports);
  return o;
}

// --- 7 ---------------------------------------------------------------------

Outcome random_coil() {
  Outcome o;
  const double ell_p = 1e-3;
  const std::size_t n_steps = KpConfig::default_steps(1.0, ell_p);
  o.check(n_steps >= 100'000, fmt("n_steps = %zu >= 1e5", n_steps));
  auto judged = [](const ComparisonReport& r) {
    return r.s == 1.0 && (r.observable.rfind("coil_var", 0) == 0 || r.observable.rfind("coil_cov", 0) == 0);
  };
  auto out = run_with_rerun(
      [&](std::uint64_t s) {
        auto t = random_coil_diagnostics(ell_p, 1.0, 1000, 1, s, {}, kZ, n_steps);
        std::vector<ComparisonReport> keep;
        for (const auto& r : t.reports) {
          if (judged(r)) keep.push_back(r);
          else o.notes.push_back("  info " + describe(r));
        }
        return DiagnosticsTable{keep, t.warnings};
      },
      kSeed);
  o.notes.push_back(fmt("  attempts %u", out.attempts));
  o.check(out.reports.size() == 6, "three variances and three cross-covariances judged");
  check_reports(o, out.reports);
  return o;
}

// --- 8 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome hygiene() {
  Outcome o;
  {
    KpConfig cfg(1000.0, 1.0, 1'000'000);
    KpIntegrator integ(cfg);
    PathStream rng(kSeed, 0);
    const double sd = std::sqrt(cfg.step());
    for (std::size_t k = 0; k < cfg.n_steps(); ++k) integ.advance(sd * rng.normal(), sd * rng.normal());
    const double defect = integ.frame().orthonormality_defect();
    o.check(defect <= 1e-8, fmt("defect after 1e6 steps %.3g <= 1e-8", defect));
  }
  {
    // Coupled refinement: the coarse path uses pairwise sums of the fine increments.
    KpConfig fine(1.0, 1.0, 2000), coarse(1.0, 1.0, 1000);
    const int m = 10'000;
    double sf = 0, sf2 = 0, sc = 0, sc2 = 0;
    for (int p = 0; p < m; ++p) {
      PathStream rng(kSeed, static_cast<std::uint64_t>(p));
      BrownianDriver d = draw_driver(fine.n_steps(), fine.step(), rng);
      BrownianDriver c{coarse.step(), {}};
      for (std::size_t k = 0; k < d.increments.size(); k += 2) {
        c.increments.push_back({d.increments[k][0] + d.increments[k + 1][0], d.increments[k][1] + d.increments[k + 1][1]});
      }
      const double xf = simulate_kp(fine, d).tangents.back().vec().z();
      const double xc = simulate_kp(coarse, c).tangents.back().vec().z();
      sf += xf;
      sf2 += xf * xf;
      sc += xc;
      sc2 += xc * xc;
    }
    const double mf = sf / m, mc = sc / m;
    const double se = std::sqrt((sf2 / m - mf * mf) / (m - 1) + (sc2 / m - mc * mc) / (m - 1));
    o.check(std::abs(mf - mc) < 2 * se,
            fmt("E[Q_L.e3] h=1e-3: %.6f, h=5e-4: %.6f, shift %.3g < 2 x %.3g", mc, mf, std::abs(mf - mc), se));
  }
  {
    const fs::path dir = fs::path("acceptance_scratch");
    fs::create_directories(dir);
    auto run = [&](const std::string& workers, const std::string& suite) {
      const std::string out = (dir / (suite + "_w" + workers + ".csv")).string();
      std::ostringstream so, se;
      cli::run({"verify", "--suite", suite, "--n-paths", "2000", "--n-list", "10,100", "--seed", "99", "--workers",
                workers, "--out", out},
               so, se);
      return slurp(out) + slurp(fs::path(out).replace_extension(".json")) +
             slurp(fs::path(out).replace_extension(".gaps.csv"));
    };
    for (const std::string suite : {"correlation", "converge"}) {
      const std::string a = run("1", suite), b = run("8", suite);
      o.check(!a.empty() && a == b, "verify --suite " + suite + " outputs byte-identical at 1 and 8 workers");
    }
    fs::remove_all(dir);
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "FRC construction exactness", 5, construction_exactness},
      {2, "FRC exact-oracle suite", 60, frc_oracles},
      {3, "KP tangent correlation", 120, tangent_correlation},
      {4, "KP mean-square position", 120, mean_square_position},
      {5, "FRC to KP convergence table", 600, convergence},
      {6, "hard-rod limit", 300, hard_rod},
      {7, "random-coil limit", 600, random_coil},
      {8, "numerical hygiene", 120, hygiene},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& c : all) selected.push_back(c.id);
  }

  bool ok = true;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(all.size())) {
      std::cerr << "unknown criterion " << id << '\n';
      return 2;
    }
    const Criterion& c = all[id - 1];
    const auto start = std::chrono::steady_clock::now();
    Outcome o = c.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.check(secs < c.budget_s, fmt("runtime %.1f s < %.0f s", secs, c.budget_s));
    for (const auto& n : o.notes) std::cout << n << '\n';
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << '\n' << std::flush;
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
