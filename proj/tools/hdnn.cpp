#include <iostream>

#include "hdnn/cli.hpp"

int main(int argc, char** argv) { return hdnn::run_cli(argc, argv, std::cout, std::cerr); }
