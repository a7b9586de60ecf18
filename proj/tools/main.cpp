#include <iostream>

#include "excavsim/cli.hpp"

int main(int argc, char** argv) { return excavsim::run_cli(argc, argv, std::cout, std::cerr); }
