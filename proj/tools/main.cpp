#include "chemsim/cli.hpp"

int main(int argc, char** argv) { return chemsim::cli_main(argc, argv); }
