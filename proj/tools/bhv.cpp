#include "bhv/cli.hpp"

int main(int argc, char** argv) { return bhv::run(argc, argv); }
