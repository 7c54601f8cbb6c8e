#include "liqrec/cli/commands.hpp"

int main(int argc, char** argv) { return liqrec::cli::run(argc, argv); }
