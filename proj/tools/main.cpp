#include "trace_shape/cli.hpp"

int main(int argc, char** argv) { return trace_shape::cli::run(argc, argv); }
