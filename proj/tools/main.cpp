#include "fluctana/cli.hpp"

int main(int argc, char** argv) { return fluctana::cli_main(argc, argv); }
