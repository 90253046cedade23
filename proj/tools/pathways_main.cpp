#include "pathways/orchestrator.hpp"

int main(int argc, char** argv) { return pathways::orch::run_cli(argc, argv); }
