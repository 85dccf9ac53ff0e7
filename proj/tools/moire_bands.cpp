#include "moire/commands.hpp"

int main(int argc, char** argv) { return moire::cli_main(argc, argv); }
