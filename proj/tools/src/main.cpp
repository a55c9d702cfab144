#include <iostream>

#include "superres/cli/app.hpp"

int main(int argc, char** argv) { return superres::cli::run(argc, argv, std::cout, std::cerr); }
