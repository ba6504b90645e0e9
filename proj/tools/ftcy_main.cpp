#include "ftcy/cli.hpp"

int main(int argc, char** argv) { return ftcy::cli::main_entry(argc, argv); }
