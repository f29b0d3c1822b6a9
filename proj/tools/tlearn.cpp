#include <iostream>

#include "tlearn/cli.hpp"

int main(int argc, char** argv) { return tlearn::run_cli(argc, argv, std::cout, std::cerr); }
