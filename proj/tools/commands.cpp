#include "commands.hpp"

#include "rgbspeckle/colormap.hpp"
#include "rgbspeckle/error.hpp"
#include "rgbspeckle/eval.hpp"
#include "rgbspeckle/experiment.hpp"
#include "rgbspeckle/graycode.hpp"
#include "rgbspeckle/hash.hpp"
#include "rgbspeckle/io.hpp"
#include "rgbspeckle/matcher.hpp"
#include "rgbspeckle/parallel.hpp"
#include "rgbspeckle/pattern.hpp"
#include "rgbspeckle/ppn.hpp"
#include "rgbspeckle/recon.hpp"
#include "rgbspeckle/serialize.hpp"
#include "rgbspeckle/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace rgbspeckle::cli {

namespace {

constexpr const char* kVersion = "1.0.0";

[[noreturn]] void fail(const std::string& msg) { throw Error("cli", msg); }

double parse_threshold(const std::string& s) {
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::logic_error&) {
    }
    fail("threshold must be a number or 'inf', got '" + s + "'");
}

std::string zero_pad(std::size_t i, int width) {
    std::string s = std::to_string(i);
    return std::string(s.size() < static_cast<std::size_t>(width) ? width - s.size() : 0, '0') + s;
}

bool has_extension(const fs::path& p, const char* ext) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ext;
}

/// Manifest shared by every command: what ran, with which parameters, and
/// content hashes of every input and output file.
class Manifest {
public:
    Manifest(std::string command, fs::path dir) : dir_(std::move(dir)) {
        doc_["command"] = std::move(command);
        doc_["version"] = kVersion;
        doc_["seed"] = nullptr;
        doc_["parameters"] = json::object();
        doc_["inputs"] = json::object();
        doc_["outputs"] = json::object();
    }

    json& operator[](const char* key) { return doc_[key]; }
    void seed(std::uint64_t s) { doc_["seed"] = s; }
    void param(const char* key, const json& value) { doc_["parameters"][key] = value; }
    void input(const fs::path& p) { doc_["inputs"][p.generic_string()] = sha256_file(p); }
    /// Records an output written to dir/name.
    void output(const std::string& name) { doc_["outputs"][name] = sha256_file(dir_ / name); }
    void write() const { write_json_file(dir_ / "manifest.json", doc_); }

private:
    fs::path dir_;
    json doc_;
};

fs::path prepare_out(const std::string& out) {
    if (out.empty()) fail("--out is required");
    fs::create_directories(out);
    return out;
}

sim::RigSpec load_rig(const std::string& path, Manifest* m) {
    sim::RigSpec rig;
    if (!path.empty()) {
        read_json_file(path).get_to(rig);
        if (m) m->input(path);
    }
    rig.validate();
    return rig;
}

// ---------------------------------------------------------------- gen-pattern

struct GenPatternArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> a, b;
    std::optional<int> period, lo_width, lo_height, upsample;
    std::string out;
};

void add_gen_pattern(CLI::App& app, std::function<void()>& run, std::ostream& os) {
    auto args = std::make_shared<GenPatternArgs>();
    auto* sc = app.add_subcommand("gen-pattern", "Generate the RGB phase-speckle projector pattern");
    sc->add_option("--config", args->config, "PatternParams JSON");
    sc->add_option("--seed", args->seed, "Scramble seed (overrides config)");
    sc->add_option("--a", args->a, "Background intensity");
    sc->add_option("--b", args->b, "Fringe amplitude");
    sc->add_option("--period", args->period, "Fringe period (low-res pixels)");
    sc->add_option("--lo-width", args->lo_width, "Low-res width");
    sc->add_option("--lo-height", args->lo_height, "Low-res height");
    sc->add_option("--upsample", args->upsample, "Block upsample factor");
    sc->add_option("--out", args->out, "Output directory")->required();
    sc->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("gen-pattern", dir);
            pattern::PatternParams p;
            if (!args->config.empty()) {
                read_json_file(args->config).get_to(p);
                m.input(args->config);
            }
            if (args->seed) p.seed = *args->seed;
            if (args->a) p.a = *args->a;
            if (args->b) p.b = *args->b;
            if (args->period) p.period = *args->period;
            if (args->lo_width) p.lo_width = *args->lo_width;
            if (args->lo_height) p.lo_height = *args->lo_height;
            if (args->upsample) p.upsample = *args->upsample;

            const RgbImage img = pattern::gen_speckle_pattern(p);
            io::write_png(img, dir / "pattern.png");
            m.output("pattern.png");
            io::write_pfm(pattern::speckle_phase(p).values(), dir / "phase.pfm");
            m.output("phase.pfm");
            write_json_file(dir / "pattern.json", json(p));
            m.output("pattern.json");
            m.seed(p.seed);
            m.param("pattern", p);
            m.write();
            os << "pattern " << img.width() << "x" << img.height() << " -> " << (dir / "pattern.png").string()
               << "\n";
        };
    });
}

// ------------------------------------------------------------------- simulate

struct SimulateArgs {
    std::vector<std::string> scenes;
    std::vector<std::string> presets;
    std::string rig;
    std::string pattern;
    std::string pattern_config;
    std::optional<std::uint64_t> seed;
    std::optional<double> noise_sigma;
    bool quantize8 = false;
    bool graycode = false;
    std::string out;
};

/// Loads the projector pattern from a PNG, or generates it from params
/// (default: sized for the rig).
RgbImage load_pattern(const std::string& png, const std::string& config, const sim::RigSpec& rig, Manifest& m) {
    if (!png.empty()) {
        m.input(png);
        m.param("pattern_source", {{"file", png}});
        return io::read_png(png);
    }
    pattern::PatternParams p = experiment::default_pattern_for(rig);
    if (!config.empty()) {
        read_json_file(config).get_to(p);
        m.input(config);
    }
    m.param("pattern_source", {{"generated", p}});
    return pattern::gen_speckle_pattern(p);
}

void add_simulate(CLI::App& app, std::function<void()>& run, std::ostream& os) {
    auto args = std::make_shared<SimulateArgs>();
    auto* sc = app.add_subcommand("simulate", "Render rectified active-stereo pairs with ground truth");
    sc->add_option("--scene", args->scenes, "Scene JSON (repeatable)");
    sc->add_option("--preset", args->presets, "Preset scene name (repeatable)")
        ->check(CLI::IsMember(sim::preset_names()));
    sc->add_option("--rig", args->rig, "Rig JSON");
    sc->add_option("--pattern", args->pattern, "Projector pattern PNG");
    sc->add_option("--pattern-config", args->pattern_config, "PatternParams JSON used when no PNG is given");
    sc->add_option("--seed", args->seed, "Noise seed (overrides scene)");
    sc->add_option("--noise-sigma", args->noise_sigma, "Gaussian noise sigma (overrides scene)");
    sc->add_flag("--quantize8", args->quantize8, "Quantize radiance to 8-bit levels before writing");
    sc->add_flag("--graycode", args->graycode, "Also derive Gray-code ground truth");
    sc->add_option("--out", args->out, "Dataset directory")->required();
    sc->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            if (args->scenes.empty() && args->presets.empty()) fail("simulate needs --scene or --preset");
            Manifest top("simulate", dir);
            const sim::RigSpec rig = load_rig(args->rig, &top);
            const RgbImage pat = load_pattern(args->pattern, args->pattern_config, rig, top);

            std::vector<std::pair<std::string, sim::SceneSpec>> scenes;
            for (const auto& f : args->scenes) {
                json j = read_json_file(f);
                top.input(f);
                if (j.contains("preset")) {
                    if (!j.contains("width")) j["width"] = rig.width;
                    if (!j.contains("height")) j["height"] = rig.height;
                }
                scenes.emplace_back(f, j.get<sim::SceneSpec>());
            }
            for (const auto& p : args->presets) scenes.emplace_back(p, sim::preset_scene(p, rig.width, rig.height));

            json listing = json::array();
            for (std::size_t i = 0; i < scenes.size(); ++i) {
                auto& [source, scene] = scenes[i];
                if (args->seed) scene.noise_seed = *args->seed;
                if (args->noise_sigma) scene.noise_sigma = *args->noise_sigma;
                if (args->quantize8) scene.quantize8 = true;

                const std::string name = "scene_" + zero_pad(i, 4);
                const fs::path sdir = dir / name;
                fs::create_directories(sdir);
                Manifest m("simulate", sdir);
                const sim::RenderOutput r = sim::render(scene, rig, pat);
                io::write_png(r.left, sdir / "left.png");
                m.output("left.png");
                io::write_png(r.right, sdir / "right.png");
                m.output("right.png");
                io::write_pfm(r.gt_disparity, sdir / "disp_gt.pfm");
                m.output("disp_gt.pfm");
                io::write_mask_png(r.occlusion, sdir / "occlusion.png");
                m.output("occlusion.png");
                io::write_mask_png(r.illuminated, sdir / "illuminated.png");
                m.output("illuminated.png");
                io::write_pfm(r.proj_coord, sdir / "proj_coord.pfm");
                m.output("proj_coord.pfm");
                if (args->graycode) {
                    const int pw = pat.width();
                    const auto stack = graycode::gen_stack(pw, pat.height(), graycode::bits_for_width(pw));
                    const auto [cl, cr] = graycode::capture_stack(stack, scene, rig);
                    const DisparityMap gc =
                        graycode::gt_from_stereo(graycode::decode_stack(cl), graycode::decode_stack(cr));
                    io::write_pfm(gc, sdir / "disp_graycode.pfm");
                    m.output("disp_graycode.pfm");
                }
                m.seed(scene.noise_seed);
                m.param("source", source);
                m.param("scene", scene);
                m.param("rig", rig);
                m.param("kappa", rig.kappa());
                m.param("proj_offset", r.proj_offset);
                m["pattern"] = top["parameters"]["pattern_source"];
                m.write();
                listing.push_back({{"dir", name}, {"source", source}});
                os << name << ": " << source << "\n";
            }
            top["scenes"] = listing;
            top.param("rig", rig);
            if (args->seed) top.seed(*args->seed);
            top.write();
        };
    });
}

// ------------------------------------------------------------------------ ppn

struct PpnArgs {
    std::string in;
    double mod_threshold = ppn::kDefaultModThreshold;
    std::string order = "rgb";
    std::string out;
};

void add_ppn(CLI::App& app, std::function<void()>& run, std::ostream& os) {
    auto args = std::make_shared<PpnArgs>();
    auto* sc = app.add_subcommand("ppn", "Decode a captured RGB image to wrapped phase");
    sc->add_option("--in", args->in, "Captured RGB PNG")->required();
    sc->add_option("--mod-threshold", args->mod_threshold, "Modulation validity threshold");
    sc->add_option("--channel-order", args->order, "Channel reordering before decoding, e.g. gbr");
    sc->add_option("--out", args->out, "Output directory")->required();
    sc->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("ppn", dir);
            m.input(args->in);
            const auto order = ppn::ChannelOrder::parse(args->order);
            const auto r = ppn::channel_permute_decode(io::read_png(args->in), order, args->mod_threshold);
            io::write_pfm(r.phase.values(), dir / "phase.pfm");
            m.output("phase.pfm");
            io::write_pfm(r.modulation, dir / "modulation.pfm");
            m.output("modulation.pfm");
            io::write_mask_png(r.valid, dir / "mask.png");
            m.output("mask.png");
            io::write_png(colormap::phase_to_hue(r.phase.values(), r.valid), dir / "phase.png");
            m.output("phase.png");
            m.param("mod_threshold", args->mod_threshold);
            m.param("channel_order", order.name());
            m.write();
            os << "valid " << r.valid.count() << " / " << r.valid.size() << " pixels\n";
        };
    });
}

// ------------------------------------------------------------------- graycode

graycode::GraycodeStack read_stack_dir(const fs::path& dir, Manifest& m) {
    const json meta = read_json_file(dir / "manifest.json");
    graycode::GraycodeStack s;
    s.n_bits = meta.at("parameters").at("n_bits").get<int>();
    s.proj_width = meta.at("parameters").at("proj_width").get<int>();
    for (const auto& name : meta.at("frames")) {
        const fs::path f = dir / name.get<std::string>();
        m.input(f);
        s.frames.push_back(io::read_png(f).r());
    }
    s.validate();
    return s;
}

void write_stack_dir(const graycode::GraycodeStack& s, const fs::path& dir, Manifest& m) {
    fs::create_directories(dir);
    json frames = json::array();
    for (std::size_t k = 0; k < s.frames.size(); ++k) {
        const std::string name = "frame_" + zero_pad(k, 2) + ".png";
        io::write_png(s.frames[k], dir / name);
        m.output(name);
        frames.push_back(name);
    }
    m["frames"] = frames;
    m.param("n_bits", s.n_bits);
    m.param("proj_width", s.proj_width);
}

struct GraycodeArgs {
    // gen
    int width = 0, height = 0;
    std::optional<int> bits;
    // capture
    std::string stack, scene, preset, rig;
    std::optional<std::uint64_t> seed;
    // decode
    std::string in;
    double threshold = graycode::kDefaultContrastThreshold;
    std::string subpixel = "edge";
    // gt
    std::string left, right;
    std::string out;
};

void add_graycode(CLI::App& app, std::function<void()>& run, std::ostream& os) {
    auto args = std::make_shared<GraycodeArgs>();
    auto* gc = app.add_subcommand("graycode", "Gray-code stacks and ground truth");
    gc->require_subcommand(1);

    auto* gen = gc->add_subcommand("gen", "Write a Gray-code frame stack");
    gen->add_option("--width", args->width, "Projector width")->required();
    gen->add_option("--height", args->height, "Projector height")->required();
    gen->add_option("--bits", args->bits, "Code bits (default: fewest that cover the width)");
    gen->add_option("--out", args->out, "Output directory")->required();
    gen->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("graycode gen", dir);
            const int bits = args->bits ? *args->bits : graycode::bits_for_width(args->width);
            const auto s = graycode::gen_stack(args->width, args->height, bits);
            write_stack_dir(s, dir, m);
            m.write();
            os << s.frames.size() << " frames, " << bits << " bits\n";
        };
    });

    auto* cap = gc->add_subcommand("capture", "Render a stack through the simulator into left/ and right/");
    cap->add_option("--stack", args->stack, "Stack directory from 'graycode gen'")->required();
    cap->add_option("--scene", args->scene, "Scene JSON");
    cap->add_option("--preset", args->preset, "Preset scene name")->check(CLI::IsMember(sim::preset_names()));
    cap->add_option("--rig", args->rig, "Rig JSON");
    cap->add_option("--seed", args->seed, "Noise seed (overrides scene)");
    cap->add_option("--out", args->out, "Output directory")->required();
    cap->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("graycode capture", dir);
            const sim::RigSpec rig = load_rig(args->rig, &m);
            const auto stack = read_stack_dir(args->stack, m);
            sim::SceneSpec scene;
            if (!args->scene.empty()) {
                json j = read_json_file(args->scene);
                m.input(args->scene);
                if (j.contains("preset")) {
                    if (!j.contains("width")) j["width"] = rig.width;
                    if (!j.contains("height")) j["height"] = rig.height;
                }
                j.get_to(scene);
            } else if (!args->preset.empty()) {
                scene = sim::preset_scene(args->preset, rig.width, rig.height);
            } else {
                fail("graycode capture needs --scene or --preset");
            }
            if (args->seed) scene.noise_seed = *args->seed;
            const auto [left, right] = graycode::capture_stack(stack, scene, rig);
            for (const auto& [sub, s] : {std::pair{"left", &left}, std::pair{"right", &right}}) {
                Manifest vm("graycode capture", dir / sub);
                write_stack_dir(*s, dir / sub, vm);
                vm.seed(scene.noise_seed);
                vm.write();
                m["views"][sub] = sha256_file(dir / sub / "manifest.json");
            }
            m.seed(scene.noise_seed);
            m.param("scene", scene);
            m.param("rig", rig);
            m.write();
            os << "captured " << stack.frames.size() << " frames per view\n";
        };
    });

    auto* dec = gc->add_subcommand("decode", "Decode a captured stack to projector coordinates");
    dec->add_option("--in", args->in, "Stack directory")->required();
    dec->add_option("--threshold", args->threshold, "White-black contrast threshold");
    dec->add_option("--subpixel", args->subpixel, "Subpixel refinement")->check(CLI::IsMember({"edge", "run"}));
    dec->add_option("--out", args->out, "Output directory")->required();
    dec->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("graycode decode", dir);
            const auto stack = read_stack_dir(args->in, m);
            const auto mode = args->subpixel == "run" ? graycode::Subpixel::Run : graycode::Subpixel::Edge;
            const auto c = graycode::decode_stack(stack, args->threshold, mode);
            io::write_pfm(c.coord, dir / "coord.pfm");
            m.output("coord.pfm");
            io::write_mask_png(c.valid, dir / "valid.png");
            m.output("valid.png");
            m.param("threshold", args->threshold);
            m.param("subpixel", args->subpixel);
            m.write();
            os << "valid " << c.valid.count() << " / " << c.valid.size() << " pixels\n";
        };
    });

    auto* gt = gc->add_subcommand("gt", "Disparity ground truth from left/right coordinate maps");
    gt->add_option("--left", args->left, "Left coord PFM")->required();
    gt->add_option("--right", args->right, "Right coord PFM")->required();
    gt->add_option("--out", args->out, "Output directory")->required();
    gt->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("graycode gt", dir);
            auto load = [&](const std::string& p) {
                m.input(p);
                graycode::CoordMap c{io::read_pfm_gray(p), {}};
                c.valid = ValidityMask(c.coord.width(), c.coord.height(), false);
                for (std::size_t i = 0; i < c.coord.size(); ++i) c.valid.set(i, std::isfinite(c.coord[i]));
                return c;
            };
            const auto d = graycode::gt_from_stereo(load(args->left), load(args->right));
            io::write_pfm(d, dir / "disp_gt.pfm");
            m.output("disp_gt.pfm");
            const ValidityMask v = d.validity();
            io::write_mask_png(v, dir / "valid.png");
            m.output("valid.png");
            m.write();
            os << "valid " << v.count() << " / " << v.size() << " pixels\n";
        };
    });
}

// ---------------------------------------------------------------------- match

struct MatchArgs {
    std::string left, right, left_mask, right_mask, config;
    std::optional<std::string> mode, lr_threshold;
    std::optional<int> d_min, d_max, radius;
    bool no_subpixel = false;
    double mod_threshold = ppn::kDefaultModThreshold;
    std::string out;
};

// Phase-mode features from a phase PFM plus an optional mask PNG.
matcher::FeatureImage phase_features(const std::string& pfm, const std::string& mask, Manifest& m) {
    m.input(pfm);
    GrayImage g = io::read_pfm_gray(pfm);
    ValidityMask valid(g.width(), g.height(), true);
    if (!mask.empty()) {
        m.input(mask);
        valid = io::read_mask_png(mask);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) {
            g[i] = 0.0f;
            valid.set(i, false);
        }
    }
    ppn::PpnResult r{PhaseField(g), GrayImage(g.width(), g.height(), 1.0f), valid};
    return matcher::embed_phase(r);
}

void add_match(CLI::App& app, std::function<void()>& run, std::ostream& os) {
    auto args = std::make_shared<MatchArgs>();
    auto* sc = app.add_subcommand("match", "Local stereo matching on raw RGB or PPN phase");
    sc->add_option("--left", args->left, "Left PNG, or phase PFM")->required();
    sc->add_option("--right", args->right, "Right PNG, or phase PFM")->required();
    sc->add_option("--left-mask", args->left_mask, "Validity PNG for a left phase PFM");
    sc->add_option("--right-mask", args->right_mask, "Validity PNG for a right phase PFM");
    sc->add_option("--config", args->config, "MatchParams JSON");
    sc->add_option("--mode", args->mode, "rgb or phase")->check(CLI::IsMember({"rgb", "phase"}));
    sc->add_option("--d-min", args->d_min, "Smallest disparity");
    sc->add_option("--d-max", args->d_max, "Largest disparity");
    sc->add_option("--radius", args->radius, "Window radius");
    sc->add_option("--lr-threshold", args->lr_threshold, "Left-right check threshold, or 'inf' to disable");
    sc->add_flag("--no-subpixel", args->no_subpixel, "Disable parabola refinement");
    sc->add_option("--mod-threshold", args->mod_threshold, "PPN modulation threshold (PNG input)");
    sc->add_option("--out", args->out, "Output directory")->required();
    sc->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("match", dir);
            matcher::MatchParams p;
            if (!args->config.empty()) {
                read_json_file(args->config).get_to(p);
                m.input(args->config);
            }
            if (args->mode) p.mode = matcher::parse_mode(*args->mode);
            if (args->d_min) p.d_min = *args->d_min;
            if (args->d_max) p.d_max = *args->d_max;
            if (args->radius) p.radius = *args->radius;
            if (args->lr_threshold) p.lr_threshold = parse_threshold(*args->lr_threshold);
            if (args->no_subpixel) p.subpixel = false;

            const bool pfm_in = has_extension(args->left, ".pfm") || has_extension(args->right, ".pfm");
            DisparityMap d;
            if (pfm_in) {
                if (p.mode != matcher::Mode::Phase) fail("PFM inputs are phase maps; use --mode phase");
                const auto fl = phase_features(args->left, args->left_mask, m);
                const auto fr = phase_features(args->right, args->right_mask, m);
                d = matcher::match(fl, fr, p);
                if (!std::isinf(p.lr_threshold))
                    d = matcher::lr_check(d, matcher::match_right_view(fl, fr, p), p.lr_threshold);
            } else {
                m.input(args->left);
                m.input(args->right);
                d = matcher::match_views(io::read_png(args->left), io::read_png(args->right), p,
                                         args->mod_threshold);
                m.param("mod_threshold", args->mod_threshold);
            }
            io::write_pfm(d, dir / "disparity.pfm");
            m.output("disparity.pfm");
            io::write_png(colormap::apply_jet(d, static_cast<float>(p.d_min), static_cast<float>(p.d_max)),
                          dir / "disparity.png");
            m.output("disparity.png");
            m.param("match", p);
            m.write();
            const auto valid = d.validity().count();
            os << "valid " << valid << " / " << d.size() << " pixels\n";
        };
    });
}

// ------------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string pred, gt, mask;
    double threshold = 3.0;
    bool no_penalize = false;
    std::string out;
};

void add_evaluate(CLI::App& app, std::function<void()>& run, std::ostream& os) {
    auto args = std::make_shared<EvaluateArgs>();
    auto* sc = app.add_subcommand("evaluate", "EPE / D1 of a disparity map against ground truth");
    sc->add_option("--pred", args->pred, "Predicted disparity PFM")->required();
    sc->add_option("--gt", args->gt, "Ground-truth disparity PFM")->required();
    sc->add_option("--mask", args->mask, "Evaluation mask PNG");
    sc->add_option("--threshold", args->threshold, "D1 threshold in pixels");
    sc->add_flag("--no-penalize", args->no_penalize, "Do not count missing predictions as D1 errors");
    sc->add_option("--out", args->out, "Output directory")->required();
    sc->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("evaluate", dir);
            m.input(args->pred);
            m.input(args->gt);
            std::optional<ValidityMask> mask;
            if (!args->mask.empty()) {
                m.input(args->mask);
                mask = io::read_mask_png(args->mask);
            }
            const auto r = eval::evaluate(io::read_pfm(args->pred), io::read_pfm(args->gt),
                                          mask ? &*mask : nullptr, {args->threshold, !args->no_penalize});
            write_json_file(dir / "report.json", json(r));
            m.output("report.json");
            io::write_png(colormap::apply_jet(r.error_map, 0.0f, static_cast<float>(2 * args->threshold)),
                          dir / "error.png");
            m.output("error.png");
            m.param("threshold", args->threshold);
            m.param("penalize_missing", !args->no_penalize);
            m.param("heatmap_range", {0.0, 2 * args->threshold});
            m.write();
            char buf[160];
            std::snprintf(buf, sizeof(buf), "EPE %.6f px  D1 %.6f %%  (%zu px)\n", r.epe, r.d1 * 100.0,
                          r.n_evaluated);
            os << buf;
        };
    });
}

// -------------------------------------------------------------------- compare

struct CompareArgs {
    std::vector<std::string> reports;
    std::string out;
};

void add_compare(CLI::App& app, std::function<void()>& run, std::ostream& os) {
    auto args = std::make_shared<CompareArgs>();
    auto* sc = app.add_subcommand("compare", "Merge evaluation reports into one table");
    sc->add_option("--report", args->reports, "Report JSON, optionally LABEL=PATH (repeatable)")->required();
    sc->add_option("--out", args->out, "Output directory")->required();
    sc->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("compare", dir);
            std::vector<std::pair<std::string, eval::EvalReport>> rows;
            for (const auto& spec : args->reports) {
                std::string label, path = spec;
                if (const auto eq = spec.find('='); eq != std::string::npos) {
                    label = spec.substr(0, eq);
                    path = spec.substr(eq + 1);
                } else {
                    const fs::path p(spec);
                    label = p.has_parent_path() ? p.parent_path().filename().string() : p.stem().string();
                }
                rows.emplace_back(label, read_json_file(path).get<eval::EvalReport>());
                m.input(path);
            }
            const auto table = eval::compare_runs(rows);
            io::write_text_file(dir / "comparison.csv", table.to_csv());
            m.output("comparison.csv");
            io::write_text_file(dir / "comparison.txt", table.to_text());
            m.output("comparison.txt");
            m.write();
            os << table.to_text();
        };
    });
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
    std::string disp, color, rig;
    double min_disp = recon::kDefaultMinDisparity;
    std::string out;
};

void add_reconstruct(CLI::App& app, std::function<void()>& run, std::ostream& os) {
    auto args = std::make_shared<ReconstructArgs>();
    auto* sc = app.add_subcommand("reconstruct", "Triangulate a disparity map into a coloured PLY");
    sc->add_option("--disp", args->disp, "Disparity PFM")->required();
    sc->add_option("--color", args->color, "Colour PNG (left view)")->required();
    sc->add_option("--rig", args->rig, "Rig JSON");
    sc->add_option("--min-disp", args->min_disp, "Smallest disparity kept");
    sc->add_option("--out", args->out, "Output directory")->required();
    sc->callback([&run, &os, args] {
        run = [&os, args] {
            const fs::path dir = prepare_out(args->out);
            Manifest m("reconstruct", dir);
            const sim::RigSpec rig = load_rig(args->rig, &m);
            m.input(args->disp);
            m.input(args->color);
            const DisparityMap d = io::read_pfm(args->disp);
            const auto cloud = recon::triangulate(d, rig, io::read_png(args->color), args->min_disp);
            io::write_ply(cloud.points, dir / "cloud.ply", recon::ply_comments(rig, d.width(), d.height()));
            m.output("cloud.ply");
            m.param("rig", rig);
            m.param("min_disp", args->min_disp);
            m.write();
            os << cloud.points.size() << " points\n";
        };
    });
}

// --------------------------------------------------------------------- ablate

struct AblateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_ablate(CLI::App& app, std::function<void()>& run, std::ostream& os) {
    auto args = std::make_shared<AblateArgs>();
    auto* sc = app.add_subcommand("ablate", "Raw-RGB vs PPN matching on clean and perturbed captures");
    sc->add_option("--config", args->config, "ExperimentConfig JSON (default: lowalbedo robustness setup)");
    sc->add_option("--seed", args->seed, "Master seed");
    sc->add_option("--out", args->out, "Output directory")->required();
    sc->callback([&run, &os, args] {
        run = [&os, args] {
            experiment::ExperimentConfig c = experiment::ExperimentConfig::defaults();
            if (!args->config.empty()) read_json_file(args->config).get_to(c);
            if (args->seed) c.seed = *args->seed;
            c.out_dir = prepare_out(args->out);
            const auto result = experiment::ablate(c);
            os << result.table.to_text();
        };
    });
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"RGB phase-speckle structured-light toolkit", "rgbspeckle"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::optional<int> threads;
    app.add_option("--threads", threads, "Worker threads (default: $RGBSPECKLE_THREADS or all cores)");

    std::function<void()> run;
    add_gen_pattern(app, run, out);
    add_simulate(app, run, out);
    add_ppn(app, run, out);
    add_graycode(app, run, out);
    add_match(app, run, out);
    add_evaluate(app, run, out);
    add_compare(app, run, out);
    add_reconstruct(app, run, out);
    add_ablate(app, run, out);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << "\n";
        return 2;
    }

    try {
        if (threads) {
            if (*threads < 1) fail("--threads must be >= 1");
            set_thread_count(*threads);
        }
        if (!run) fail("no command given");
        run();
    } catch (const Error& e) {
        err << "error[" << e.module() << "]: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        err << "error[config]: " << e.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& e) {
        err << "error[io]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error[internal]: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace rgbspeckle::cli
