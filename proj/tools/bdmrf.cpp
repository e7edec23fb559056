#include "bdmrf/cli.hpp"

int main(int argc, char** argv) { return bdmrf::run_cli(argc, argv); }
