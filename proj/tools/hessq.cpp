#include <iostream>

#include "hessq/cli.hpp"

int main(int argc, char** argv) { return hessq::cli::main(argc, argv, std::cout, std::cerr); }
