#include "parisian/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return parisian::run_cli(argc, argv, std::cout, std::cerr); }
