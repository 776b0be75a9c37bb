// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/cli.hpp"

int main(int argc, char** argv) { return smg::run_cli(argc, argv); }
