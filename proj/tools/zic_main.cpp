#include "zic/cli.hpp"

int main(int argc, char** argv) { return zic::cli::main(argc, argv); }
