#include <iostream>

#include "fkwc/cli.hpp"

int main(int argc, char** argv) { return fkwc::cli::run_cli(argc, argv, std::cout, std::cerr); }
