#include <iostream>
#include <string>
#include <vector>

#include "bpseval/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bpseval::cli::dispatch(args, std::cout, std::cerr);
}
