#include "cli.hpp"

int main(int argc, char** argv) { return chaoslab::cli::run_command(argc, argv); }
