// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

// Links only pgt_verify. If the verifier ever depended on the task generators
// or the template registry, this target would fail to link.

#include <cstdio>

#include "pgt/verify.hpp"

int main() {
    const nlohmann::json task = {
        {"subtask", "count_color"},
        {"answer_rule", "numeral"},
        {"slots", {{"color", "blue"}}},
        {"options", nlohmann::json::array()},
        {"tolerances", {{"disk_gap_px", 2}}},
        {"overlay",
         {{{"type", "circle"}, {"color", "blue"}, {"center", {0.3, 0.3}}, {"radius", 0.05}, {"alpha", 0.55}},
          {{"type", "circle"}, {"color", "blue"}, {"center", {0.7, 0.7}}, {"radius", 0.05}, {"alpha", 0.55}}}}};
    const auto answer = pgt::rederive_answer(task, 448, 448);
    if (answer != "2") {
        std::printf("FAIL: expected 2, got %s\n", answer.c_str());
        return 1;
    }
    std::printf("PASS: verifier re-derives without the generators\n");
    return 0;
}
