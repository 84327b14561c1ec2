#include "subseries/cli.hpp"

int main(int argc, char** argv) { return subseries::run_cli(argc, argv); }
