#include <iostream>
#include <string>
#include <vector>

#include "aclbdd/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return aclbdd::cli::run(args, std::cout, std::cerr);
}
