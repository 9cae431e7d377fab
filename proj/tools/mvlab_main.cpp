#include "mvlab/cli.hpp"

int main(int argc, const char** argv) { return mvlab::run_cli(argc, argv); }
