#include <iostream>

#include "poolmech/cli.hpp"

int main(int argc, char** argv) {
  return poolmech::run_cli(argc, argv, std::cout, std::cerr);
}
