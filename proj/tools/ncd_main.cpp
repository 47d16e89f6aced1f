#include "ncd/cli.hpp"

int main(int argc, char** argv) { return ncd::run_cli(argc, argv); }
