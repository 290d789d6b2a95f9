#include "nlsh/harness.hpp"

int main(int argc, char** argv) { return nlsh::run_cli(argc, argv); }
