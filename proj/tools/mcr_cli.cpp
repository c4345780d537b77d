#include "mcr/cli.hpp"

int main(int argc, char** argv) { return mcr::cli_main(argc, argv); }
