#include "cli.hpp"

int main(int argc, char** argv) { return hapstep::cli::main(argc, argv); }
