#include "tauforge/cli.hpp"

int main(int argc, char** argv) { return tauforge::cli::run(argc, argv); }
