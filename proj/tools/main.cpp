#include "cli.hpp"

int main(int argc, char** argv) { return entbound::cli::run(argc, argv); }
