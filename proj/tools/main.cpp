#include <iostream>

#include "polyrc/cli.hpp"

int main(int argc, char** argv) { return polyrc::run_cli(argc, argv, std::cout, std::cerr); }
