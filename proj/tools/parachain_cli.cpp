#include "parachain/harness/cli.hpp"

int main(int argc, char** argv) { return parachain::cli::cli_dispatch(argc, argv); }
