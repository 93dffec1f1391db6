#include "gausscap/cli.hpp"

int main(int argc, char** argv) { return gausscap::run_cli(argc, argv); }
