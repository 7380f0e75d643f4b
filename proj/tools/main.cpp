#include "hybridnet/cli.hpp"

int main(int argc, char** argv) { return hybridnet::cli_main(argc, argv); }
