#include <iostream>

#include "audiobook/orchestrator/cli.hpp"

int main(int argc, char** argv) { return audiobook::run_cli(argc, argv, std::cout, std::cerr); }
