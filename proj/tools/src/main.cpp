#include <string>
#include <vector>

#include "coarselab_cli/run.hpp"

int main(int argc, char** argv) {
  return coarse::cli::run_command(
      std::vector<std::string>(argv + 1, argv + argc));
}
