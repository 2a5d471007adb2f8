#include "crbt/cli.hpp"

int main(int argc, char** argv) { return crbt::run_cli(argc, argv); }
