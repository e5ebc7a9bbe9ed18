#include <iostream>

#include "cmf/cli.hpp"

int main(int argc, char** argv) { return cmf::cli_main(argc, argv, std::cout, std::cerr); }
