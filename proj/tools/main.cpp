#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return lipgan::cli_main(argc, argv, std::cout, std::cerr); }
