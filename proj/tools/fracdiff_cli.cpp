#include <iostream>
#include <string>
#include <vector>

#include "fracdiff/cli_io.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return fracdiff::cli_main(args, std::cout, std::cerr);
}
