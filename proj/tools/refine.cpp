#include <iostream>

#include "prefine/cli/run.hpp"

int main(int argc, char** argv) { return prefine::cli::run_command_line(argc, argv, std::cerr); }
