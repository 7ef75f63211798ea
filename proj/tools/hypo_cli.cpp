#include "hypo/cli.hpp"

int main(int argc, char** argv) { return hypo::run_cli(argc, argv); }
