#include "rgbspeckle/experiment.hpp"

#include "rgbspeckle/colormap.hpp"
#include "rgbspeckle/error.hpp"
#include "rgbspeckle/hash.hpp"
#include "rgbspeckle/io.hpp"
#include "rgbspeckle/serialize.hpp"

#include <cmath>
#include <limits>

using nlohmann::json;

namespace rgbspeckle::experiment {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("experiment", msg); }

std::string target_name(PerturbTarget t) { return t == PerturbTarget::Left ? "left" : "both"; }

PerturbTarget parse_target(const std::string& s) {
    if (s == "left") return PerturbTarget::Left;
    if (s == "both") return PerturbTarget::Both;
    fail("perturb_target must be 'left' or 'both', got '" + s + "'");
}

} // namespace

pattern::PatternParams default_pattern_for(const sim::RigSpec& rig, double d_max) {
    pattern::PatternParams p;
    const int need_w = rig.width + static_cast<int>(std::ceil(rig.kappa() * d_max));
    if (p.width() < need_w) p.lo_width = (need_w + p.upsample - 1) / p.upsample;
    if (p.height() < rig.height) p.lo_height = (rig.height + p.upsample - 1) / p.upsample;
    return p;
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.scene = sim::preset_scene("lowalbedo", c.rig.width, c.rig.height);
    c.scene_label = "lowalbedo";
    c.pattern = default_pattern_for(c.rig);
    sim::PerturbParams shift;
    shift.gains = {1.3, 0.8, 1.0};
    shift.offsets = {0.1, 0.1, 0.1};
    c.perturbations = {shift};
    c.rgb_match.mode = matcher::Mode::Rgb;
    c.phase_match.mode = matcher::Mode::Phase;
    c.rgb_match.lr_threshold = std::numeric_limits<double>::infinity();
    c.phase_match.lr_threshold = std::numeric_limits<double>::infinity();
    return c;
}

const Cell& AblationResult::cell(const std::string& label) const {
    for (const auto& c : cells)
        if (c.label == label) return c;
    fail("no ablation cell '" + label + "'");
}

ValidityMask evaluation_mask(const sim::RenderOutput& render, int radius) {
    ValidityMask m = render.occlusion & render.illuminated;
    const int w = m.width();
    const int h = m.height();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (x < radius || y < radius || x >= w - radius || y >= h - radius) m.set(x, y, false);
    return m;
}

AblationResult ablate(const ExperimentConfig& config) {
    pattern::PatternParams pp = config.pattern;
    pp.seed = config.seed;
    sim::SceneSpec scene = config.scene;
    scene.noise_seed = config.seed;

    const RgbImage pat = pattern::gen_speckle_pattern(pp);
    const sim::RenderOutput clean = sim::render(scene, config.rig, pat);

    struct Capture {
        std::string condition;
        RgbImage left, right;
    };
    std::vector<Capture> captures{{"clean", clean.left, clean.right}};
    for (std::size_t k = 0; k < config.perturbations.size(); ++k) {
        sim::PerturbParams p = config.perturbations[k];
        p.seed = config.seed + 1 + k;
        Capture c{"perturbed-" + std::to_string(k), sim::perturb(clean.left, p, sim::View::Left), clean.right};
        if (config.perturb_target == PerturbTarget::Both) c.right = sim::perturb(clean.right, p, sim::View::Right);
        captures.push_back(std::move(c));
    }

    AblationResult result;
    eval::EvalOptions opts{config.eval_threshold, config.penalize_missing};
    for (const auto* params : {&config.rgb_match, &config.phase_match}) {
        params->validate(config.rig.width);
        const ValidityMask mask = evaluation_mask(clean, params->radius);
        for (const auto& cap : captures) {
            const DisparityMap pred = matcher::match_views(cap.left, cap.right, *params, config.mod_threshold);
            Cell cell;
            cell.mode = params->mode;
            cell.condition = cap.condition;
            cell.label = matcher::to_string(params->mode) + "/" + cap.condition;
            cell.report = eval::evaluate(pred, clean.gt_disparity, &mask, opts);
            result.cells.push_back(std::move(cell));
        }
    }

    std::vector<std::pair<std::string, eval::EvalReport>> rows;
    for (const auto& c : result.cells) rows.emplace_back(c.label, c.report);
    result.table = eval::compare_runs(rows);

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        json outputs = json::object();
        auto record = [&](const std::string& name) { outputs[name] = sha256_file(config.out_dir / name); };

        io::write_text_file(config.out_dir / "ablation.csv", result.table.to_csv());
        record("ablation.csv");
        io::write_text_file(config.out_dir / "ablation.txt", result.table.to_text());
        record("ablation.txt");
        json cells = json::array();
        for (const auto& c : result.cells) {
            const std::string name = "heatmap_" + matcher::to_string(c.mode) + "_" + c.condition + ".png";
            io::write_png(colormap::apply_jet(c.report.error_map, 0.0f, static_cast<float>(2 * config.eval_threshold)),
                          config.out_dir / name);
            record(name);
            cells.push_back({{"label", c.label}, {"report", c.report}, {"heatmap", name}});
        }
        json manifest{{"command", "ablate"},
                      {"seed", config.seed},
                      {"config", config},
                      {"heatmap_range", {0.0, 2 * config.eval_threshold}},
                      {"cells", cells},
                      {"outputs", outputs}};
        write_json_file(config.out_dir / "manifest.json", manifest);
    }
    return result;
}

void to_json(json& j, const ExperimentConfig& c) {
    j = json{{"pattern", c.pattern},
             {"scene", c.scene},
             {"scene_label", c.scene_label},
             {"rig", c.rig},
             {"perturbations", c.perturbations},
             {"perturb_target", target_name(c.perturb_target)},
             {"rgb_match", c.rgb_match},
             {"phase_match", c.phase_match},
             {"mod_threshold", c.mod_threshold},
             {"eval_threshold", c.eval_threshold},
             {"penalize_missing", c.penalize_missing},
             {"seed", c.seed}};
}

void from_json(const json& j, ExperimentConfig& c) {
    c = ExperimentConfig::defaults();
    if (auto it = j.find("rig"); it != j.end()) it->get_to(c.rig);
    if (auto it = j.find("pattern"); it != j.end()) {
        it->get_to(c.pattern);
    } else {
        c.pattern = default_pattern_for(c.rig);
    }
    if (auto it = j.find("scene"); it != j.end()) {
        json s = *it;
        if (s.contains("preset")) {
            c.scene_label = s["preset"].get<std::string>();
            if (!s.contains("width")) s["width"] = c.rig.width;
            if (!s.contains("height")) s["height"] = c.rig.height;
        } else {
            c.scene_label = "custom";
        }
        s.get_to(c.scene);
    } else if (j.contains("rig")) {
        c.scene = sim::preset_scene(c.scene_label, c.rig.width, c.rig.height);
    }
    if (auto it = j.find("scene_label"); it != j.end()) it->get_to(c.scene_label);
    if (auto it = j.find("perturbations"); it != j.end()) it->get_to(c.perturbations);
    if (auto it = j.find("perturb_target"); it != j.end()) c.perturb_target = parse_target(it->get<std::string>());
    if (auto it = j.find("rgb_match"); it != j.end()) {
        c.rgb_match = matcher::MatchParams{};
        c.rgb_match.lr_threshold = std::numeric_limits<double>::infinity();
        from_json(*it, c.rgb_match);
        c.rgb_match.mode = matcher::Mode::Rgb;
    }
    if (auto it = j.find("phase_match"); it != j.end()) {
        c.phase_match = matcher::MatchParams{};
        c.phase_match.lr_threshold = std::numeric_limits<double>::infinity();
        from_json(*it, c.phase_match);
        c.phase_match.mode = matcher::Mode::Phase;
    }
    if (auto it = j.find("mod_threshold"); it != j.end()) it->get_to(c.mod_threshold);
    if (auto it = j.find("eval_threshold"); it != j.end()) it->get_to(c.eval_threshold);
    if (auto it = j.find("penalize_missing"); it != j.end()) it->get_to(c.penalize_missing);
    if (auto it = j.find("seed"); it != j.end()) it->get_to(c.seed);
}

} // namespace rgbspeckle::experiment
