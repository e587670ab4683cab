#include "coincast/cli.hpp"

int main(int argc, char** argv) { return coincast::cli::run(argc, argv); }
