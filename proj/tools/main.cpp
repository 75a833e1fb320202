#include <iostream>

#include "gcdeig/cli.hpp"

int main(int argc, char** argv) { return gcdeig::cli::run(argc, argv, std::cout, std::cerr); }
