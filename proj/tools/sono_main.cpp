#include <iostream>
#include <string>
#include <vector>

#include "sono/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return sono::cli::run(args, std::cout, std::cerr);
}
