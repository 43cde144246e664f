#include "cli.hpp"

int main(int argc, char** argv) { return noma::cli::cli_main(argc, argv); }
