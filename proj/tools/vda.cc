#include <iostream>
#include <string>
#include <vector>

#include "vda/cli/commands.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vda::cli::run(args, std::cout, std::cerr);
}
