#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace wormchain::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kUsage = 2,
  kVerificationFailed = 3,
};

/// Entry point of the `wormchain` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat `key = value` config text; '#' starts a comment. Also accepts a JSON
/// run summary, whose "config" object is used.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Worker count from WORMCHAIN_WORKERS, else the hardware concurrency.
unsigned default_workers();

}  // namespace wormchain::cli
