#include <iostream>

#include "pansde/experiments.hpp"

int main(int argc, char** argv) {
    return pansde::cli::run_cli(argc, argv, std::cout, std::cerr);
}
