#include <iostream>

#include "notimind/cli.hpp"

int main(int argc, char** argv) { return notimind::run_cli(argc, argv, std::cout, std::cerr); }
