#include <iostream>

#include "nlb/cli.hpp"

int main(int argc, char** argv) { return nlb::cli::run(argc, argv, std::cout, std::cerr); }
