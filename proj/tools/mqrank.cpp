#include <iostream>

#include "mqrank/cli.hpp"

int main(int argc, char** argv) { return mqrank::run_cli(argc, argv, std::cout, std::cerr); }
