#include <iostream>

#include "pireduce/cli.hpp"

int main(int argc, char** argv) { return pireduce::run_cli(argc, argv, std::cout, std::cerr); }
