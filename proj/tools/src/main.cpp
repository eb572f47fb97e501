#include <iostream>

#include "lyapguard_cli/commands.hpp"

int main(int argc, char** argv) {
  return lyapguard::cli::run_cli(argc, argv, std::cout, std::cerr);
}
