#include "ccqm/cli.hpp"

int main(int argc, char** argv) { return ccqm::run_cli(argc, argv); }
