#include <iostream>

#include "sdelab/cli.hpp"

int main(int argc, char** argv) { return sdelab::cli::main(argc, argv, std::cout, std::cerr); }
