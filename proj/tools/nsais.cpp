#include "nsais/cli.hpp"

int main(int argc, char** argv) { return nsais::cli::run(argc, argv); }
