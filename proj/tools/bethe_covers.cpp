#include <iostream>
#include <string>
#include <vector>

#include "bethe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bethe::cli::run(args, std::cout, std::cerr);
}
