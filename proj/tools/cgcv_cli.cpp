#include "cgcv/cli.hpp"

int main(int argc, char** argv) { return cgcv::cli_main(argc, argv); }
