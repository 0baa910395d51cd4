#include "wormchain/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace wormchain {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  // Subnormals report out-of-range but are parsed exactly.
  if (ptr != end || text.empty() || (ec != std::errc() && !(ec == std::errc::result_out_of_range && std::fpclassify(v) == FP_SUBNORMAL))) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return v;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      table.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(field));
    table.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

void write_chain_csv(std::ostream& out, const DiscreteChain& chain, bool include_phi) {
  out << (include_phi ? "n,x,y,z,phi\n" : "n,x,y,z\n");
  for (std::size_t n = 0; n < chain.beads.size(); ++n) {
    const Vec3& r = chain.beads[n];
    out << n << ',' << format_double(r.x()) << ',' << format_double(r.y()) << ','
        << format_double(r.z());
    if (include_phi) {
      out << ',';
      if (n >= 2 && n - 2 < chain.phis.size()) out << format_double(chain.phis[n - 2]);
    }
    out << '\n';
  }
}

void write_path_csv(std::ostream& out, const PathSample& path) {
  out << "s,Qx,Qy,Qz,Rx,Ry,Rz\n";
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    const Vec3& q = path.tangents[k].vec();
    const Vec3& r = path.positions[k];
    out << format_double(path.grid[k]) << ',' << format_double(q.x()) << ',' << format_double(q.y())
        << ',' << format_double(q.z()) << ',' << format_double(r.x()) << ',' << format_double(r.y())
        << ',' << format_double(r.z()) << '\n';
  }
}

void write_reports_csv(std::ostream& out, const std::vector<ComparisonReport>& reports) {
  out << "observable,s,t,estimate,stderr,oracle,z,pass\n";
  for (const auto& r : reports) {
    out << csv_field(r.observable) << ',' << format_double(r.s) << ',' << format_double(r.t) << ','
        << format_double(r.estimate) << ',' << format_double(r.std_error) << ','
        << format_double(r.oracle) << ',' << format_double(r.z) << ',' << (r.pass ? "true" : "false")
        << '\n';
  }
}

void write_gaps_csv(std::ostream& out, const std::vector<GapRow>& gaps) {
  out << "N,s,observable,frc_oracle,kp_closed_form,gap,estimate,stderr\n";
  for (const auto& g : gaps) {
    out << g.n_bonds << ',' << format_double(g.s) << ',' << csv_field(g.observable) << ','
        << format_double(g.frc_oracle) << ',' << format_double(g.kp_closed_form) << ','
        << format_double(g.gap) << ',' << format_double(g.estimate) << ','
        << format_double(g.std_error) << '\n';
  }
}

std::vector<ComparisonReport> reports_from_csv(const CsvTable& table) {
  if (table.empty()) throw std::invalid_argument("report CSV has no header");
  const std::vector<std::string> expected{"observable", "s", "t", "estimate", "stderr", "oracle", "z", "pass"};
  if (table.front() != expected) throw std::invalid_argument("not a report CSV (unexpected header)");
  std::vector<ComparisonReport> out;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& row = table[i];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != expected.size()) {
      throw std::invalid_argument("report CSV row " + std::to_string(i) + " has wrong field count");
    }
    ComparisonReport r;
    r.observable = row[0];
    r.s = parse_double(row[1]);
    r.t = parse_double(row[2]);
    r.estimate = parse_double(row[3]);
    r.std_error = parse_double(row[4]);
    r.oracle = parse_double(row[5]);
    r.z = parse_double(row[6]);
    r.pass = row[7] == "true";
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

nlohmann::json to_json(const ComparisonReport& r) {
  return {{"observable", r.observable},
          {"s", number(r.s)},
          {"t", number(r.t)},
          {"estimate", number(r.estimate)},
          {"stderr", number(r.std_error)},
          {"oracle", number(r.oracle)},
          {"z", number(r.z)},
          {"pass", r.pass},
          {"threshold", number(r.threshold)},
          {"kind", r.kind == CheckKind::ZScore ? "z_score" : "upper_bound"}};
}

nlohmann::json to_json(const GapRow& g) {
  return {{"N", g.n_bonds},
          {"s", number(g.s)},
          {"observable", g.observable},
          {"frc_oracle", number(g.frc_oracle)},
          {"kp_closed_form", number(g.kp_closed_form)},
          {"gap", number(g.gap)},
          {"estimate", number(g.estimate)},
          {"stderr", number(g.std_error)}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace wormchain
