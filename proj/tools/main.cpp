#include <iostream>

#include "dynens/cli.hpp"

int main(int argc, char** argv) { return dynens::cli::run(argc, argv, std::cout, std::cerr); }
