#include "telesim/cli.hpp"

int main(int argc, char** argv) { return telesim::cli::run(argc, argv); }
