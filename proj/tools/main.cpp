#include "agsf/cli.hpp"

int main(int argc, char** argv) { return agsf::cli_main(argc, argv); }
