#include "qcmps_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return qcmps::cli::run_cli(argc, argv, std::cout, std::cerr); }
