#include "commands.hpp"

int main(int argc, char** argv) { return gpt::cli::cli_main(argc, argv); }
