#include "zll/cli.hpp"

int main(int argc, char** argv) { return zll::cli_main(argc, argv); }
