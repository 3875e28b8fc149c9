#include <string>
#include <vector>

#include "proxdg/bench.hpp"

int main(int argc, char** argv) {
  return proxdg::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
