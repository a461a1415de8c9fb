#include <iostream>
#include <string>
#include <vector>

#include "memchan_cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return memchan::cli::run(args, std::cout, std::cerr);
}
