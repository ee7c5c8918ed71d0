#include <iostream>
#include <string>
#include <vector>

#include "rqda/cli.hpp"

int main(int argc, char** argv) {
  return rqda::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
