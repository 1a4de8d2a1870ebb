#include "app/commands.hpp"

int main(int argc, char** argv) { return magflow::app::run_cli(argc, argv); }
