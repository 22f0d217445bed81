#include "iffm/commands.hpp"

int main(int argc, char** argv) { return iffm::run_cli(argc, argv); }
