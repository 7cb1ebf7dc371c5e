#include <satlab/cli.hpp>

int main(int argc, char** argv) { return satlab::cli_main(argc, argv); }
