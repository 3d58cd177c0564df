#include <iostream>

#include "qpl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qpl::cli::dispatch(args, std::cout, std::cerr);
}
