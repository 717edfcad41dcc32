#include <iostream>

#include "me2f/cli/commands.hpp"

int main(int argc, char** argv) { return me2f::cli::run(argc, argv, std::cout, std::cerr); }
