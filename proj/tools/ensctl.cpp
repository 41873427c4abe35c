#include "ensctl/cli.hpp"

int main(int argc, char** argv) { return ensctl::run_command(argc, argv); }
