#include "stochctl/cli/run.hpp"

int main(int argc, char** argv) { return stochctl::cli::main_entry(argc, argv); }
