#include "viscodecay/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return viscodecay::run_cli(argc, argv, std::cout, std::cerr); }
