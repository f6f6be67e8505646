// Copyright (C) 2026 The pgtgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "pgt/geometry.hpp"
#include "pgt/render.hpp"
#include "pgt/rng.hpp"

namespace pgt {

enum class TaskFamily : std::uint8_t { SpatialRelation, Counting, DistanceAnalogy };

inline constexpr std::array<TaskFamily, 3> kAllFamilies{
    TaskFamily::SpatialRelation, TaskFamily::Counting, TaskFamily::DistanceAnalogy};

enum class Subtask : std::uint8_t {
    RelativePositioning,
    CoordinateRegression,
    CountColor,
    ClosestPoint,
    ColorAnalogy,
};

inline constexpr std::array<Subtask, 5> kAllSubtasks{
    Subtask::RelativePositioning, Subtask::CoordinateRegression, Subtask::CountColor,
    Subtask::ClosestPoint, Subtask::ColorAnalogy};

TaskFamily family_of(Subtask s);
std::string_view to_string(TaskFamily f);
std::string_view to_string(Subtask s);
std::optional<TaskFamily> family_from_string(std::string_view name);
std::optional<Subtask> subtask_from_string(std::string_view name);

// Ground truth per sub-task. Every field is recomputable from the overlay.

struct RelationTruth {
    ColorId a_color;
    ColorId b_color;
    Relation rel;  ///< relation of the a_color box with respect to the b_color box
};

struct CenterTruth {
    ColorId color;
    NormPoint point;
};

struct CountTruth {
    ColorId target_color;
    int count = 0;
    std::map<ColorId, int> distractor_counts;
};

struct ClosestTruth {
    char target_label;
    std::vector<char> candidate_labels;
    char answer_label;
};

struct AnalogyTruth {
    char query_label;
    char answer_label;
    ColorId shared_color;
};

using GroundTruth = std::variant<RelationTruth, CenterTruth, CountTruth, ClosestTruth, AnalogyTruth>;

struct SpatialParams {
    SizeRange size_range{0.08, 0.25};
    double margin = 0.05;
    int max_attempts = 1000;
    /// Outline width in pixels; 0 selects max(2, 1% of min(width, height)).
    int stroke_px = 0;
};

struct CountingParams {
    int count_min = 1;
    int count_max = 6;
    int distractor_colors_min = 1;
    int distractor_colors_max = 2;
    /// Circle radius range as a fraction of min(width, height).
    double radius_min = 0.035;
    double radius_max = 0.06;
    double alpha = 0.55;
    /// Placement attempts per circle before the whole layout is restarted.
    int max_attempts = 200;
    int max_restarts = 20;
};

struct DistanceParams {
    int n_points = 4;
    /// In isotropic units (fractions of the longer canvas side).
    double min_separation = 0.15;
    double closest_gap = 0.05;
    /// Fraction of min(width, height).
    double radius = 0.05;
    double alpha = 0.8;
    int max_attempts = 1000;
};

struct TaskParams {
    SpatialParams spatial;
    CountingParams counting;
    DistanceParams distance;
    /// Minimum pixel clearance between any two disks, within and across tasks.
    int disk_gap_px = 2;

    /// Throws ConfigError naming the first offending field.
    void validate() const;
};

/// A disk already placed on the canvas, in pixel units.
struct PixelDisk {
    double cx;
    double cy;
    double r;
};

/// Canvas facts and the footprint of tasks already placed on the same image.
struct TaskContext {
    int width = 448;
    int height = 448;
    /// Colours no new circle may use.
    std::vector<ColorId> reserved_colors;
    std::vector<PixelDisk> occupied;
};

/// The tolerances an instance was generated under, kept for re-verification.
struct Tolerances {
    double margin = 0.0;
    double min_separation = 0.0;
    double closest_gap = 0.0;
    int disk_gap_px = 0;
};

struct TaskInstance {
    TaskFamily family;
    Subtask subtask;
    OverlaySpec overlay;
    GroundTruth truth;
    Tolerances tolerances;
};

/// One draw, uniform over the three families.
TaskFamily sample_family(Rng& rng);

/// `k` pairwise-distinct families drawn without replacement; k draws.
std::vector<TaskFamily> sample_distinct_families(Rng& rng, int k);

/// Green/red outline pair; sub-task chosen 50/50.
TaskInstance gen_spatial(Rng& rng, const SpatialParams& params, const TaskContext& ctx);

/// Semi-transparent, non-overlapping disks in one target and 1-2 distractor colours.
TaskInstance gen_counting(Rng& rng, const CountingParams& params, int disk_gap_px,
                          const TaskContext& ctx);

/// Lettered disks; sub-task chosen 50/50 between closest point and colour analogy.
TaskInstance gen_distance_analogy(Rng& rng, const DistanceParams& params, int disk_gap_px,
                                  const TaskContext& ctx);

TaskInstance generate_task(TaskFamily family, Rng& rng, const TaskParams& params,
                           const TaskContext& ctx);

/// Records the colours and disks of `instance` in `ctx` so later tasks avoid them.
void reserve_footprint(TaskContext& ctx, const TaskInstance& instance);

}  // namespace pgt
