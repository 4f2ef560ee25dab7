#include "reglab/cli.hpp"

int main(int argc, char** argv) { return reglab::dispatch(argc, argv); }
