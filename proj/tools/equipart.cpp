#include <iostream>

#include "equipart/cli.hpp"

int main(int argc, char** argv) { return equipart::run_cli(argc, argv, std::cout, std::cerr); }
