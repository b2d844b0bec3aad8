#include <iostream>
#include <string>
#include <vector>

#include "metgen/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return metgen::run_cli(args, std::cout, std::cerr);
}
