#include "dyad/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return dyad::run_cli(argc, argv, std::cout, std::cerr); }
