#include "hqcgan/cli.hpp"

int main(int argc, char** argv) { return hqcgan::cli::run_cli(argc, argv); }
