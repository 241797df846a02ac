#include "surprobe/cli.hpp"

int main(int argc, char** argv) { return surprobe::cli::run_cli(argc, argv); }
