#include "rsnet/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return rsnet::cli::run_cli(argc, argv, std::cout, std::cerr); }
