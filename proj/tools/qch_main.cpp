#include <iostream>

#include "qch/cli.hpp"

int main(int argc, char** argv) {
  return qch::run_cli(argc, argv, std::cout, std::cerr);
}
