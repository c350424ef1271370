#include "commands.hpp"

int main(int argc, char** argv) { return hallcal::cli::run(argc, argv); }
