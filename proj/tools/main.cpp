#include "fbmpersist/cli.hpp"

int main(int argc, char** argv) { return fbmpersist::cli::main(argc, argv); }
