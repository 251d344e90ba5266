#include "actgate/cli.hpp"

int main(int argc, char** argv) { return actgate::run_cli(argc, argv); }
