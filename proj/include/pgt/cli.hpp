// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace pgt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// The pgtgen command line. Reports go to `out`, logs and errors to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pgt
