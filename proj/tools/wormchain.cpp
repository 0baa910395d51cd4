#include <iostream>
#include <string>
#include <vector>

#include "wormchain/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wormchain::cli::run(args, std::cout, std::cerr);
}
