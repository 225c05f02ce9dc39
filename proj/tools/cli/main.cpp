#include "app.hpp"

int main(int argc, char** argv) { return reebflow::cli::run(argc, argv); }
