#include <iostream>
#include <string>
#include <vector>

#include "yamabe/cli.hpp"

int main(int argc, char** argv) {
  return yamabe::cli::run(std::vector<std::string>(argv, argv + argc), std::cout);
}
