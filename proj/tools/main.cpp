#include <iostream>

#include "mindful/harness/cli.hpp"

int main(int argc, char** argv) {
  return mindful::harness::run_cli(argc, argv, std::cout, std::cerr);
}
