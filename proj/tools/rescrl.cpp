#include "rescrl/commands.hpp"

int main(int argc, char** argv) { return rescrl::cli_main(argc, argv); }
