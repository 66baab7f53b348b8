// SPDX-License-Identifier: Apache-2.0
#include "liqgame/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return liqgame::cli::run(argc, argv, std::cout, std::cerr); }
