#include "hardcore/cli.hpp"

int main(int argc, char** argv) { return hardcore::cli::main(argc, argv); }
