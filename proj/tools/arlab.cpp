#include <iostream>

#include "arl/experiment.hpp"

int main(int argc, char** argv) {
  return arl::run_cli(argc, argv, std::cout, std::cerr);
}
