#include "sarmoco/cli.hpp"

int main(int argc, char** argv) { return sarmoco::cli::run(argc, argv); }
