#include "cli.hpp"

int main(int argc, char** argv) { return speedscale::cli::dispatch(argc, argv); }
