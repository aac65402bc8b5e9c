#include "capsd/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return capsd::runCli(argc, argv, std::cout, std::cerr); }
