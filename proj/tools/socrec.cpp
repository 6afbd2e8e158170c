#include <iostream>
#include <string>
#include <vector>

#include "socrec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return socrec::cli::run_cli(args, std::cout, std::cerr);
}
