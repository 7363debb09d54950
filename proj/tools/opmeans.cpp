#include <iostream>

#include "opmeans/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return opmeans::cli::run(args, std::cout, std::cerr);
}
