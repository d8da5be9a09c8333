#include <iostream>

#include "proxyllm/cli.hpp"

int main(int argc, char** argv) {
  return proxyllm::cli::run(argc, argv, std::cin, std::cout, std::cerr, proxyllm::cli::process_env());
}
