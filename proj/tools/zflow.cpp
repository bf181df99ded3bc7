#include <iostream>

#include "zflow/harness.hpp"

int main(int argc, char** argv) { return zflow::harness::run_cli(argc, argv, std::cout, std::cerr); }
