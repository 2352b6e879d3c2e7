#include <iostream>
#include <string>
#include <vector>

#include "mongerays/cli.hpp"

int main(int argc, char** argv) {
  return mongerays::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
