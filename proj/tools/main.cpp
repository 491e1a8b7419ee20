#include "ldknn_cli/commands.hpp"

int main(int argc, char** argv) { return ldknn::cli::run_cli(argc, argv); }
