#include "molspec/cli/commands.hpp"

int main(int argc, char** argv) { return molspec::cli::run(argc, argv); }
