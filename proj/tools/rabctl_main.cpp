#include <iostream>

#include "rabctl/cli.hpp"

int main(int argc, char** argv) { return rabctl::cli_dispatch(argc, argv, std::cout, std::cerr); }
