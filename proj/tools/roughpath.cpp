#include <iostream>

#include "roughpath/harness.hpp"

int main(int argc, char** argv) { return rp::harness::cli_dispatch(argc, argv, std::cout, std::cerr); }
