#include "edtr/cli.hpp"

int main(int argc, char** argv) { return edtr::cli::run(argc, argv); }
