#include "sitekit/cli.hpp"

int main(int argc, char** argv) { return sitekit::cli::run(argc, argv); }
