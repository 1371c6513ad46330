#include <iostream>
#include <string>
#include <vector>

#include "bftavail/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bftavail::run_cli(args, std::cout, std::cerr);
}
