#include <iostream>
#include <string>
#include <vector>

#include "hplb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hplb::run_command(args, std::cout, std::cerr);
}
