#include "photonbound/cli/commands.hpp"

int main(int argc, char** argv) { return photonbound::cli::run_cli(argc, argv); }
