#include "spath/commands.hpp"

int main(int argc, char** argv) { return spath::run_cli(argc, argv); }
