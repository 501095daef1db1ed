#include "annulus/cli.hpp"

int main(int argc, char** argv) { return annulus::cli_main(argc, argv); }
