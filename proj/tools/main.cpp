#include <iostream>

#include "bsynth/cli.hpp"

int main(int argc, char** argv) { return bsynth::run_cli(argc, argv, std::cout, std::cerr); }
