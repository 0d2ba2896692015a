#include "sesop/bench/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return sesop::bench::cli_main(argc, argv, std::cout, std::cerr);
}
