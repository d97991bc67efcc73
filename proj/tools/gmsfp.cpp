#include <string>
#include <vector>

#include "gmsfp_cli.hpp"

int main(int argc, char** argv) {
  return gmsfp::cli::run(std::vector<std::string>(argv, argv + argc));
}
