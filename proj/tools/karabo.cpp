#include <iostream>
#include <string>
#include <vector>

#include "karabo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return karabo::cli::run(args, std::cout, std::cerr);
}
