#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return photon_beat::cli::run(argc, argv, std::cout, std::cerr); }
