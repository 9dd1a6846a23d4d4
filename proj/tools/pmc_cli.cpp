#include "pmc/cli_io/app.hpp"

int main(int argc, char** argv) { return pmc::io::run_cli(argc, argv); }
