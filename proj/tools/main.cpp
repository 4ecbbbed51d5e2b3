#include "clothtrack/cli.hpp"

int main(int argc, char** argv) { return clothtrack::cli::run(argc, argv); }
