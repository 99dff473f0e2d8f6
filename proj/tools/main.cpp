#include <iostream>

#include "owenext_cli.hpp"

int main(int argc, char** argv) { return owenext::cli::run_cli(argc, argv, std::cout, std::cerr); }
