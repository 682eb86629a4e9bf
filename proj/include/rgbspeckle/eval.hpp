#pragma once

#include "rgbspeckle/image.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rgbspeckle::eval {

struct EvalOptions {
    double threshold = 3.0;         ///< D1 threshold in pixels
    bool penalize_missing = true;   ///< GT-valid pixels without a prediction count as D1 errors
};

/// EPE is the mean |pred - gt| over pixels valid in prediction, GT and mask
/// (n_evaluated of them). D1 is the fraction of those above threshold; with
/// penalize_missing, the n_missing pixels valid in GT and mask but not in the
/// prediction are added to both numerator and denominator of D1.
struct EvalReport {
    double epe = 0.0;
    double d1 = 0.0;
    std::size_t n_evaluated = 0;
    std::size_t n_missing = 0;
    double threshold = 3.0;
    bool penalize_missing = true;
    DisparityMap error_map;  ///< |pred - gt| on evaluated pixels, NaN elsewhere
};

/// Throws Error("eval", ...) on size mismatch, non-positive threshold, or an
/// empty evaluation set.
EvalReport evaluate(const DisparityMap& pred, const DisparityMap& gt, const ValidityMask* mask,
                    const EvalOptions& options = {});

/// Fixed-order pairwise (tree) summation: split at n/2 down to blocks of 8.
double pairwise_sum(std::span<const double> values);

struct ComparisonRow {
    std::string label;
    double epe = 0.0;
    double d1 = 0.0;
    std::size_t n_evaluated = 0;
    double threshold = 0.0;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    /// label,epe,d1,d1_percent,n_evaluated,threshold (full precision)
    std::string to_csv() const;
    /// Aligned human-readable table, D1 as percent.
    std::string to_text() const;
    static ComparisonTable parse_csv(const std::string& csv);
};

/// One row per report, stably sorted by label.
ComparisonTable compare_runs(const std::vector<std::pair<std::string, EvalReport>>& reports);

} // namespace rgbspeckle::eval
