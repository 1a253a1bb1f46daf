#include <iostream>

#include "thc/cli.hpp"

int main(int argc, char** argv) { return thc::cli::run(argc, argv, std::cout, std::cerr); }
