#include <iostream>

#include "lqp/cli.hpp"

int main(int argc, char** argv) { return lqp::run_cli(argc, argv, std::cout, std::cerr); }
