#include "commands.hpp"

int main(int argc, char** argv) { return cbi::cli::run_command(argc, argv); }
