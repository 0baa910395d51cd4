#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wormchain/chain.hpp"
#include "wormchain/diagnostics.hpp"
#include "wormchain/kp.hpp"

namespace wormchain {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest text that round-trips a double (17 significant digits);
/// "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);
double parse_double(const std::string& text);

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& text);

using CsvTable = std::vector<std::vector<std::string>>;
/// Parses RFC 4180 text; the first row is the header.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// n,x,y,z[,phi]; phi is the torsion that built bond n (empty for n < 2).
void write_chain_csv(std::ostream& out, const DiscreteChain& chain, bool include_phi = true);
/// s,Qx,Qy,Qz,Rx,Ry,Rz
void write_path_csv(std::ostream& out, const PathSample& path);
/// observable,s,t,estimate,stderr,oracle,z,pass
void write_reports_csv(std::ostream& out, const std::vector<ComparisonReport>& reports);
/// N,s,observable,frc_oracle,kp_closed_form,gap,estimate,stderr
void write_gaps_csv(std::ostream& out, const std::vector<GapRow>& gaps);

std::vector<ComparisonReport> reports_from_csv(const CsvTable& table);

nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const GapRow& g);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace wormchain
