#include <iostream>

#include "tvl/cli.hpp"

int main(int argc, char** argv) { return tvl::cli_dispatch(argc, argv, std::cout, std::cerr); }
