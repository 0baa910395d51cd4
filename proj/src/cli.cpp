#include "wormchain/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "wormchain/analytics.hpp"
#include "wormchain/chain.hpp"
#include "wormchain/diagnostics.hpp"
#include "wormchain/io.hpp"
#include "wormchain/kp.hpp"

namespace wormchain::cli {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const double v = parse_double(item);
    if (!(v >= 1.0) || v != std::floor(v)) throw std::invalid_argument("bad list entry '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix) {
  auto stem = p;
  stem.replace_extension();
  return stem.string() + suffix;
}

/// Splices `--key value` pairs from a config file in front of the command line
/// arguments of a subcommand, so explicit flags (parsed later) win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config requires a file argument");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  std::vector<std::string> out{args[0]};
  if (!config_path.empty()) {
    for (const auto& [k, v] : parse_config_text(read_text_file(config_path))) {
      out.push_back("--" + k);
      out.push_back(v);
    }
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

void print_report(std::ostream& out, const ComparisonReport& r) {
  out << (r.pass ? "PASS " : "FAIL ") << r.observable << " s=" << r.s << " t=" << r.t
      << " estimate=" << format_double(r.estimate) << " stderr=" << format_double(r.std_error)
      << " oracle=" << format_double(r.oracle) << " z=" << format_double(r.z) << '\n';
}

// --- simulate ---------------------------------------------------------------

struct FrcArgs {
  std::size_t n_bonds = 0;
  double bond_length = 0.0;
  double bond_angle = 0.0;
  double contour_length = 0.0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  bool no_phi = false;
};

int cmd_simulate_frc(const FrcArgs& a, CLI::App& app, std::ostream& out, std::ostream& err) {
  const bool raw = app.count("--bond-length") || app.count("--bond-angle");
  const bool scaled = app.count("--contour-length") || app.count("--kappa");
  if (raw == scaled || (raw && !(app.count("--bond-length") && app.count("--bond-angle"))) ||
      (scaled && !(app.count("--contour-length") && app.count("--kappa")))) {
    err << "simulate-frc: give either --bond-length and --bond-angle, or --contour-length and --kappa\n"
        << app.help();
    return kUsage;
  }
  FrcConfig cfg = raw ? FrcConfig::raw(a.n_bonds, a.bond_length, a.bond_angle)
                      : FrcConfig::scaled(a.n_bonds, a.contour_length, a.kappa);
  PathStream rng(a.seed, 0);
  const auto chain = sample_frc(cfg, rng);
  std::ostringstream csv;
  write_chain_csv(csv, chain, !a.no_phi);
  write_text_file(a.out, csv.str());
  out << "wrote " << chain.beads.size() << " beads to " << a.out << '\n';
  return kOk;
}

struct KpArgs {
  double contour_length = 0.0;
  double ell_p = 0.0;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate_kp(const KpArgs& a, std::ostream& out) {
  const KpConfig cfg(a.contour_length, a.ell_p, a.n_steps);
  PathStream rng(a.seed, 0);
  const auto path = simulate_kp(cfg, rng);
  std::ostringstream csv;
  write_path_csv(csv, path);
  write_text_file(a.out, csv.str());
  out << "wrote " << path.grid.size() << " grid points to " << a.out << '\n';
  return kOk;
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  double contour_length = 1.0;
  double ell_p = 1.0;
  std::size_t n_steps = 0;
  double kappa = 0.0;
  std::string n_list = "100,1000,10000";
  double hard_rod_ell_p = 1e4;
  double random_coil_ell_p = 1e-3;
  std::size_t grid_points = 4;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 0;
  double threshold = kDefaultZThreshold;
  unsigned workers = 0;
  std::string out = "verify_report.csv";
  std::string json_out;
  std::string gaps_out;
};

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"correlation", "msd", "converge", "hard-rod", "random-coil"};
  return names;
}

json config_json(const VerifyArgs& a) {
  return {{"suite", a.suite},
          {"contour-length", a.contour_length},
          {"ell-p", a.ell_p},
          {"n-steps", a.n_steps},
          {"kappa", a.kappa},
          {"n-list", a.n_list},
          {"hard-rod-ell-p", a.hard_rod_ell_p},
          {"random-coil-ell-p", a.random_coil_ell_p},
          {"grid-points", a.grid_points},
          {"n-paths", a.n_paths},
          {"seed", a.seed},
          {"threshold", a.threshold}};
}

int cmd_verify(VerifyArgs a, std::ostream& out, std::ostream& err) {
  const auto& names = suite_names();
  std::vector<std::string> suites;
  if (a.suite == "all") {
    suites = names;
  } else if (std::find(names.begin(), names.end(), a.suite) != names.end()) {
    suites = {a.suite};
  } else {
    err << "verify: unknown suite '" << a.suite << "' (expected correlation|msd|converge|hard-rod|random-coil|all)\n";
    return kUsage;
  }
  if (a.n_paths < 2) {
    err << "verify: --n-paths must be >= 2\n";
    return kUsage;
  }
  if (a.kappa == 0.0) a.kappa = std::sqrt(2.0 * a.contour_length / a.ell_p);
  const auto n_list = parse_size_list(a.n_list);
  EnsembleOptions opts;
  opts.workers = a.workers ? a.workers : default_workers();

  const auto start = std::chrono::steady_clock::now();
  std::vector<ComparisonReport> reports;
  std::vector<GapRow> gaps;
  json suite_json = json::object();
  json reports_json = json::array();
  bool ok = true;

  for (const auto& name : suites) {
    std::function<DiagnosticsTable(std::uint64_t)> run;
    std::vector<GapRow> suite_gaps;
    if (name == "correlation") {
      run = [&](std::uint64_t s) {
        return DiagnosticsTable{correlation_suite(KpConfig(a.contour_length, a.ell_p, a.n_steps), a.n_paths, s,
                                                  opts, a.threshold),
                                {}};
      };
    } else if (name == "msd") {
      run = [&](std::uint64_t s) {
        return DiagnosticsTable{
            msd_suite(KpConfig(a.contour_length, a.ell_p, a.n_steps), a.n_paths, s, opts, a.threshold), {}};
      };
    } else if (name == "converge") {
      run = [&](std::uint64_t s) {
        auto table = convergence_table(a.contour_length, a.kappa, n_list, a.n_paths, s, opts, a.threshold);
        suite_gaps = std::move(table.gaps);
        return DiagnosticsTable{std::move(table.reports), {}};
      };
    } else if (name == "hard-rod") {
      run = [&](std::uint64_t s) {
        return hard_rod_diagnostics(a.hard_rod_ell_p, a.contour_length, a.n_paths, a.grid_points, s, opts,
                                    a.threshold, 0);
      };
    } else {
      run = [&](std::uint64_t s) {
        return random_coil_diagnostics(a.random_coil_ell_p, a.contour_length, a.n_paths, a.grid_points, s,
                                       opts, a.threshold, 0);
      };
    }
    const auto outcome = run_with_rerun(run, a.seed);
    for (const auto& w : outcome.warnings) err << "warning: " << w << '\n';
    out << "suite " << name << ": " << (outcome.passed ? "pass" : "FAIL") << " (attempts "
        << outcome.attempts << ")\n";
    for (const auto& r : outcome.reports) {
      print_report(out, r);
      auto j = to_json(r);
      j["suite"] = name;
      reports_json.push_back(std::move(j));
    }
    suite_json[name] = {{"passed", outcome.passed},
                        {"attempts", outcome.attempts},
                        {"seed_used", outcome.seed_used},
                        {"warnings", outcome.warnings}};
    ok = ok && outcome.passed;
    reports.insert(reports.end(), outcome.reports.begin(), outcome.reports.end());
    gaps.insert(gaps.end(), suite_gaps.begin(), suite_gaps.end());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream csv;
  write_reports_csv(csv, reports);
  write_text_file(a.out, csv.str());

  json gaps_json = json::array();
  for (const auto& g : gaps) gaps_json.push_back(to_json(g));
  if (!gaps.empty()) {
    std::ostringstream gcsv;
    write_gaps_csv(gcsv, gaps);
    write_text_file(a.gaps_out.empty() ? with_suffix(a.out, ".gaps.csv") : std::filesystem::path(a.gaps_out),
                    gcsv.str());
  }

  json summary{{"config", config_json(a)},
               {"seed", a.seed},
               {"n_paths", a.n_paths},
               {"suites", suite_json},
               {"reports", reports_json},
               {"gaps", gaps_json},
               {"passed", ok}};
  write_text_file(a.json_out.empty() ? with_suffix(a.out, ".json") : std::filesystem::path(a.json_out),
                  summary.dump(2) + "\n");
  // Timing stays out of the files so they are reproducible byte for byte.
  out << (ok ? "verify: pass" : "verify: FAIL") << " (" << wall << " s)\n";
  return ok ? kOk : kVerificationFailed;
}

// --- plotdata ---------------------------------------------------------------

struct PlotArgs {
  std::string input;
  std::string kind = "correlation";
  double ell_p = 0.0;
  std::size_t curve_points = 0;
  std::string out;
};

struct PlotRow {
  std::string series;
  double x, y, lo, hi;
};

void oracle_curve(std::vector<PlotRow>& rows, const std::string& kind, double ell_p,
                  const std::vector<double>& xs) {
  for (double x : xs) {
    const double y = kind == "msd" ? kp_mean_sq_position(ell_p, x) : kp_tangent_correlation(ell_p, 0.0, x);
    rows.push_back({"oracle_curve", x, y, y, y});
  }
}

int cmd_plotdata(const PlotArgs& a, std::ostream& out, std::ostream& err) {
  if (!std::filesystem::exists(a.input)) {
    err << "plotdata: input not found: " << a.input << '\n';
    return kIoError;
  }
  const CsvTable table = read_csv_file(a.input);
  std::vector<PlotRow> rows;
  const std::vector<std::string> path_header{"s", "Qx", "Qy", "Qz", "Rx", "Ry", "Rz"};
  const std::vector<std::string> gap_header{"N", "s", "observable", "frc_oracle", "kp_closed_form",
                                            "gap", "estimate", "stderr"};

  if (!table.empty() && table.front() == path_header) {
    // Single path: Q_s.e3 (correlation) or |R_s|^2 (msd) along the grid.
    std::vector<double> xs;
    for (std::size_t i = 1; i < table.size(); ++i) {
      const auto& r = table[i];
      if (r.size() != path_header.size()) continue;
      const double s = parse_double(r[0]);
      double y;
      if (a.kind == "msd") {
        const double rx = parse_double(r[4]), ry = parse_double(r[5]), rz = parse_double(r[6]);
        y = rx * rx + ry * ry + rz * rz;
      } else {
        y = parse_double(r[3]);
      }
      rows.push_back({a.kind == "msd" ? "|R_s|^2" : "Q_s.e3", s, y, y, y});
      xs.push_back(s);
    }
    if (a.ell_p > 0.0) oracle_curve(rows, a.kind, a.ell_p, xs);
  } else if (!table.empty() && table.front() == gap_header) {
    for (std::size_t i = 1; i < table.size(); ++i) {
      const auto& r = table[i];
      if (r.size() != gap_header.size()) continue;
      const double n = parse_double(r[0]);
      const std::string at = "@s=" + r[1];
      const double est = parse_double(r[6]);
      const double se = parse_double(r[7]);
      const double gap = parse_double(r[5]);
      rows.push_back({"gap_" + r[2] + at, n, gap, gap, gap});
      rows.push_back({"estimate_" + r[2] + at, n, est, est - 2.0 * se, est + 2.0 * se});
      const double frc = parse_double(r[3]);
      rows.push_back({"frc_oracle_" + r[2] + at, n, frc, frc, frc});
    }
  } else {
    const auto reports = reports_from_csv(table);
    const std::string wanted = a.kind == "msd" ? "|R_s|^2" : "Q_s.Q_t";
    std::vector<double> xs;
    double x_max = 0.0;
    for (const auto& r : reports) {
      if (r.observable != wanted) continue;
      if (a.kind != "msd" && r.s != 0.0) continue;
      rows.push_back({"estimate", r.t, r.estimate, r.estimate - 2.0 * r.std_error, r.estimate + 2.0 * r.std_error});
      rows.push_back({"oracle", r.t, r.oracle, r.oracle, r.oracle});
      x_max = std::max(x_max, r.t);
    }
    if (a.ell_p > 0.0 && x_max > 0.0) {
      const std::size_t n = a.curve_points ? a.curve_points : 100;
      for (std::size_t k = 0; k <= n; ++k) xs.push_back(x_max * static_cast<double>(k) / static_cast<double>(n));
      oracle_curve(rows, a.kind, a.ell_p, xs);
    }
  }

  std::ostringstream csv;
  csv << "series,x,y,y_lo,y_hi\n";
  for (const auto& r : rows) {
    csv << csv_field(r.series) << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
        << format_double(r.lo) << ',' << format_double(r.hi) << '\n';
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    write_text_file(a.out, csv.str());
  }
  return kOk;
}

}  // namespace

unsigned default_workers() {
  if (const char* env = std::getenv("WORMCHAIN_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json doc = json::parse(text);
    const json& cfg = doc.contains("config") ? doc.at("config") : doc;
    for (const auto& [k, v] : cfg.items()) {
      out[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return out;
  }
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"wormchain: freely rotating chain and Kratky-Porod polymer simulator", "wormchain"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  FrcArgs frc;
  auto* sim_frc = app.add_subcommand("simulate-frc", "Sample one freely rotating chain to CSV");
  sim_frc->add_option("--n-bonds", frc.n_bonds, "Number of bonds N")->required()->check(CLI::PositiveNumber);
  sim_frc->add_option("--bond-length", frc.bond_length, "Bond length a (raw mode)");
  sim_frc->add_option("--bond-angle", frc.bond_angle, "Bond angle theta in radians (raw mode)");
  sim_frc->add_option("--contour-length", frc.contour_length, "Contour length L (scaled mode)");
  sim_frc->add_option("--kappa", frc.kappa, "Stiffness kappa, theta = kappa/sqrt(N) (scaled mode)");
  sim_frc->add_option("--seed", frc.seed, "Random seed")->required();
  sim_frc->add_option("--out", frc.out, "Output CSV")->required();
  sim_frc->add_flag("--no-phi", frc.no_phi, "Omit the torsion column");

  KpArgs kp;
  auto* sim_kp = app.add_subcommand("simulate-kp", "Integrate one Kratky-Porod path to CSV");
  sim_kp->add_option("--contour-length", kp.contour_length, "Contour length L")->required();
  sim_kp->add_option("--ell-p", kp.ell_p, "Persistence length")->required();
  sim_kp->add_option("--n-steps", kp.n_steps, "Grid steps (default max(1000, ceil(100 L/ell_p)))");
  sim_kp->add_option("--seed", kp.seed, "Random seed")->required();
  sim_kp->add_option("--out", kp.out, "Output CSV")->required();

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Monte Carlo checks against closed-form oracles");
  verify->add_option("--suite", ver.suite, "correlation|msd|converge|hard-rod|random-coil|all")->required();
  verify->add_option("--contour-length", ver.contour_length, "Contour length L");
  verify->add_option("--ell-p", ver.ell_p, "Persistence length (correlation, msd)");
  verify->add_option("--n-steps", ver.n_steps, "Grid steps for correlation/msd (0 = default)");
  verify->add_option("--kappa", ver.kappa, "Chain stiffness for converge (default sqrt(2L/ell_p))");
  verify->add_option("--n-list", ver.n_list, "Comma-separated bond counts for converge");
  verify->add_option("--hard-rod-ell-p", ver.hard_rod_ell_p, "Persistence length for hard-rod");
  verify->add_option("--random-coil-ell-p", ver.random_coil_ell_p, "Persistence length for random-coil");
  verify->add_option("--grid-points", ver.grid_points, "Evaluation points for limit diagnostics");
  verify->add_option("--n-paths", ver.n_paths, "Paths per ensemble");
  verify->add_option("--seed", ver.seed, "Random seed")->required();
  verify->add_option("--threshold", ver.threshold, "z-score threshold");
  verify->add_option("--workers", ver.workers, "Worker threads (default $WORMCHAIN_WORKERS or all cores)");
  verify->add_option("--out", ver.out, "Report CSV");
  verify->add_option("--json", ver.json_out, "JSON summary (default <out>.json)");
  verify->add_option("--gaps", ver.gaps_out, "Convergence gap CSV (default <out>.gaps.csv)");

  PlotArgs plot;
  auto* plotdata = app.add_subcommand("plotdata", "Long-format plot data from a report, gap or path CSV");
  plotdata->add_option("--input", plot.input, "Input CSV")->required();
  plotdata->add_option("--kind", plot.kind, "correlation|msd (ignored for gap tables)")
      ->check(CLI::IsMember({"correlation", "msd"}));
  plotdata->add_option("--ell-p", plot.ell_p, "Persistence length for the oracle curve");
  plotdata->add_option("--curve-points", plot.curve_points, "Oracle curve resolution for reports");
  plotdata->add_option("--out", plot.out, "Output CSV (default stdout)");

  try {
    auto args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*sim_frc) return cmd_simulate_frc(frc, *sim_frc, out, err);
    if (*sim_kp) return cmd_simulate_kp(kp, out);
    if (*verify) return cmd_verify(ver, out, err);
    if (*plotdata) return cmd_plotdata(plot, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kUsage;
}

}  // namespace wormchain::cli
