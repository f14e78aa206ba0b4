#include <iostream>
#include <string>
#include <vector>

#include "topiclabel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return topiclabel::run_cli(args, std::cout, std::cerr);
}
