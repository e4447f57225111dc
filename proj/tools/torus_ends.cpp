#include "torus_ends/io/cli.hpp"

int main(int argc, char** argv) { return torus_ends::cli::run(argc, argv); }
