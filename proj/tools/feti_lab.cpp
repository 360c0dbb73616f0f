#include "feti_lab/cli.hpp"

int main(int argc, char** argv) { return feti_lab::cli::run(argc, argv); }
