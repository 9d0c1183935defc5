#include <goafem/cli.hpp>

#include <iostream>

int main(int argc, char **argv) { return goafem::cli::main(argc, argv, std::cout, std::cerr); }
