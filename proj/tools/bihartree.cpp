#include "bihartree/cli.hpp"

int main(int argc, char** argv) { return bihartree::cli_main(argc, argv); }
