#include <iostream>
#include <string>
#include <vector>

#include "rsigma/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rsigma::cli::run(args, std::cout, std::cerr);
}
