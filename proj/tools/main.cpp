#include "cli.hpp"

int main(int argc, char** argv) { return phasehpss::cli::run(argc, argv); }
