#include "paretoset/cli.hpp"

int main(int argc, char** argv) { return paretoset::run_cli(argc, argv); }
