#include "aos/cli.hpp"

int main(int argc, char** argv) { return aos::cli::run(argc, argv); }
