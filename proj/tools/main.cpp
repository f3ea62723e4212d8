// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "splitshot/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return splitshot::cli::run(args, std::cout, std::cerr);
}
