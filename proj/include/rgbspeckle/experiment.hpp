#pragma once

#include "rgbspeckle/eval.hpp"
#include "rgbspeckle/matcher.hpp"
#include "rgbspeckle/pattern.hpp"
#include "rgbspeckle/simulator.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rgbspeckle::experiment {

/// Default projector pattern for a rig: upsample-4 blocks, wide enough for
/// width + kappa * d_max and at least as tall as the rig.
pattern::PatternParams default_pattern_for(const sim::RigSpec& rig, double d_max = 64.0);

/// Which captured views a perturbation is applied to.
enum class PerturbTarget { Left, Both };

/// Ablation grid: every matcher mode runs on the clean capture and on each
/// perturbed capture.
///
/// `seed` is the master seed. It replaces pattern.seed and scene.noise_seed,
/// and perturbation k draws its noise from seed + 1 + k.
struct ExperimentConfig {
    pattern::PatternParams pattern;
    sim::SceneSpec scene;
    std::string scene_label = "custom";
    sim::RigSpec rig;
    std::vector<sim::PerturbParams> perturbations;
    PerturbTarget perturb_target = PerturbTarget::Left;
    matcher::MatchParams rgb_match;
    matcher::MatchParams phase_match;
    double mod_threshold = 0.05;
    double eval_threshold = 3.0;
    bool penalize_missing = true;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir;

    /// Defaults mirroring the lowalbedo robustness experiment.
    static ExperimentConfig defaults();
};

/// One (mode, condition) cell of the grid.
struct Cell {
    std::string label;     ///< "<mode>/<condition>", e.g. "phase/clean"
    matcher::Mode mode = matcher::Mode::Phase;
    std::string condition; ///< "clean" or "perturbed-<k>"
    eval::EvalReport report;
};

struct AblationResult {
    std::vector<Cell> cells;
    eval::ComparisonTable table;

    const Cell& cell(const std::string& label) const;
};

/// Pixels scored against ground truth: visible in both views, reached by the
/// projector, and with a full matching window (`radius` from every border).
ValidityMask evaluation_mask(const sim::RenderOutput& render, int radius);

/// Renders the scene, runs every cell, and when out_dir is set writes
/// ablation.csv, ablation.txt, one error heatmap per cell and manifest.json.
AblationResult ablate(const ExperimentConfig& config);

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// The scene may be a preset reference ({"preset": name}); missing fields keep
/// the defaults() values.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

} // namespace rgbspeckle::experiment
