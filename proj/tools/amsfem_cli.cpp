#include "amsfem/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return amsfem::cli::run(argc, argv, std::cout, std::cerr); }
