#include "qrlock/cli.hpp"

int main(int argc, char** argv) { return qrlock::cli::run(argc, argv); }
