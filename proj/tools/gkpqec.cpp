#include "gkpqec/cli.hpp"

int main(int argc, char** argv) { return gkpqec::run_cli(argc, argv); }
