#include "roughwalk/cli.hpp"

int main(int argc, char** argv) { return roughwalk::run_cli(argc, argv); }
