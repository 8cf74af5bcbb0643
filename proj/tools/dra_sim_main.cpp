#include <vector>

#include "dra/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dra::run_cli(args);
}
