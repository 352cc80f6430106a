#include <iostream>

#include "ktau/cli.hpp"

int main(int argc, char** argv) { return ktau::cli::run(argc, argv, std::cout, std::cerr); }
