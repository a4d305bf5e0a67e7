#include <iostream>
#include <string>
#include <vector>

#include "hns/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hns::run_cli(args, std::cout, std::cerr);
}
