#include <iostream>

#include "toricflow/cli.hpp"

int main(int argc, char** argv) {
  return toricflow::cli::run_command(argc, argv, std::cout, std::cerr);
}
