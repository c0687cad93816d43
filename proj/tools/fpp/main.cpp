#include <iostream>

#include "fpp/cli/commands.hpp"

int main(int argc, char** argv) { return fpp::cli::main_entry(argc, argv, std::cout, std::cerr); }
