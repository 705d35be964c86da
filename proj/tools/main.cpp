#include <string>
#include <vector>

#include "gaitse/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gaitse::cli::run_cli(args);
}
