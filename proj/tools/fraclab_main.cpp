#include "fraclab/harness.hpp"

int main(int argc, char** argv) { return fraclab::cli_main(argc, argv); }
