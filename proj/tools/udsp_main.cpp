#include "udsp/cli.hpp"

int main(int argc, char **argv) { return udsp::cli::run(argc, argv); }
