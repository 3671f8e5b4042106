#include <iostream>

#include "cflow/cli.hpp"

int main(int argc, char** argv) { return cflow::cli::run(argc, argv, std::cout, std::cerr); }
