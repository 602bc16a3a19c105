#include "nrpca/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return nrpca::cli::run(argc, argv, std::cout, std::cerr); }
