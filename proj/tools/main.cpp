#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return swid::cli::run(argc, argv, std::cout, std::cerr); }
