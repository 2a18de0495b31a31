#include "cli/commands.hpp"

int main(int argc, char** argv) { return hitrun::cli::run(argc, argv); }
