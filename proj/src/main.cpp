#include "critwin/cli.hpp"

int main(int argc, char** argv) { return critwin::cli::run(argc, argv); }
