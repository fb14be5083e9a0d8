#include "schrocon/app.hpp"

int main(int argc, char** argv) { return schrocon::cli_main(argc, argv); }
