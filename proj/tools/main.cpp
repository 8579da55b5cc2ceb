// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include "crbmo/cli.hpp"

int main(int argc, char** argv) {
  return crbmo::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
