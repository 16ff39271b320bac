#include <iostream>

#include "sslp/cli.hpp"

int main(int argc, char** argv) { return sslp::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
