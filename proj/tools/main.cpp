#include <iostream>
#include <string>
#include <vector>

#include "partialwave_cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pwcli::run(args, std::cout, std::cerr);
}
