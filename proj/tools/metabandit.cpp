#include <iostream>
#include <string>
#include <vector>

#include "metainf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return metainf::run_cli(args, std::cout, std::cerr);
}
