#include "heff/commands.hpp"

int main(int argc, char** argv) { return heff::run_cli(argc, argv); }
