#include <iostream>

#include "ukgc/cli.hpp"

int main(int argc, char** argv) { return ukgc::cli::run(argc, argv, std::cout, std::cerr); }
