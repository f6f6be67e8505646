// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "pgt/cli.hpp"

int main(int argc, char** argv) { return pgt::run_cli(argc, argv, std::cout, std::cerr); }
