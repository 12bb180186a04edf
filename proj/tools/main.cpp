#include <iostream>
#include <string>
#include <vector>

#include "dispersal/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return dispersal::run_cli(args, std::cout, std::cerr);
}
