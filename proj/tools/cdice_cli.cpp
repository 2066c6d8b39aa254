#include <iostream>

#include "cdice/cli.hpp"

int main(int argc, char** argv) { return cdice::cli::run(argc, argv, std::cout, std::cerr); }
