#include "radiomap/cli.hpp"

int main(int argc, char** argv) { return radiomap::cli::run(argc, argv); }
