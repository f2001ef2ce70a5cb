#include <iostream>
#include <string>
#include <vector>

#include "qrecycle/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return qrecycle::cli::run(args, std::cout, std::cerr);
}
