#include <iostream>

#include "positlab/cli.hpp"

int main(int argc, char** argv) { return positlab::run_cli(argc, argv, std::cout, std::cerr); }
