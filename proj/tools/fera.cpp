// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "fera/cli.hpp"

int main(int argc, char** argv) { return fera::cli::run(argc, argv, std::cout, std::cerr); }
