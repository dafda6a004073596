#include "gdmd/cli.hpp"

int main(int argc, char** argv) { return gdmd::cli::run(argc, argv); }
