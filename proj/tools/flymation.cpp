#include "flymation/cli.hpp"

int main(int argc, char** argv) { return flymation::cli::run(argc, argv); }
