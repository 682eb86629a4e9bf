#include "rgbspeckle/serialize.hpp"

#include "rgbspeckle/error.hpp"
#include "rgbspeckle/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

using nlohmann::json;

namespace {

template <class T>
void get_opt(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) it->get_to(out);
}

// JSON has no infinity; encode it as null/"inf".
double read_threshold(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (it->is_null()) return std::numeric_limits<double>::infinity();
    if (it->is_string()) {
        const auto s = it->get<std::string>();
        if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
        throw rgbspeckle::Error("config", std::string("bad value for '") + key + "'");
    }
    return it->get<double>();
}

json write_threshold(double v) { return std::isinf(v) ? json("inf") : json(v); }

} // namespace

namespace rgbspeckle::pattern {

void to_json(json& j, const PatternParams& p) {
    j = json{{"a", p.a},
             {"b", p.b},
             {"period", p.period},
             {"lo_width", p.lo_width},
             {"lo_height", p.lo_height},
             {"upsample", p.upsample},
             {"seed", p.seed}};
}

void from_json(const json& j, PatternParams& p) {
    get_opt(j, "a", p.a);
    get_opt(j, "b", p.b);
    get_opt(j, "period", p.period);
    get_opt(j, "lo_width", p.lo_width);
    get_opt(j, "lo_height", p.lo_height);
    get_opt(j, "upsample", p.upsample);
    get_opt(j, "seed", p.seed);
}

} // namespace rgbspeckle::pattern

namespace rgbspeckle::sim {

void to_json(json& j, const RigSpec& r) {
    j = json{{"focal", r.focal},
             {"baseline", r.baseline},
             {"proj_baseline", r.proj_baseline},
             {"width", r.width},
             {"height", r.height}};
}

void from_json(const json& j, RigSpec& r) {
    get_opt(j, "focal", r.focal);
    get_opt(j, "baseline", r.baseline);
    get_opt(j, "proj_baseline", r.proj_baseline);
    get_opt(j, "width", r.width);
    get_opt(j, "height", r.height);
}

void to_json(json& j, const Layer& l) {
    j = json{{"disparity", {{"d0", l.disparity.d0}, {"dx", l.disparity.dx}, {"dy", l.disparity.dy}}},
             {"albedo", l.albedo}};
    if (l.region)
        j["region"] = {{"x0", l.region->x0}, {"y0", l.region->y0}, {"x1", l.region->x1}, {"y1", l.region->y1}};
    else
        j["region"] = nullptr;
}

void from_json(const json& j, Layer& l) {
    if (auto it = j.find("region"); it != j.end() && !it->is_null()) {
        Rect r;
        it->at("x0").get_to(r.x0);
        it->at("y0").get_to(r.y0);
        it->at("x1").get_to(r.x1);
        it->at("y1").get_to(r.y1);
        l.region = r;
    } else {
        l.region.reset();
    }
    const json& d = j.at("disparity");
    if (d.is_number()) {
        l.disparity = DisparityPlane{d.get<double>(), 0.0, 0.0};
    } else {
        get_opt(d, "d0", l.disparity.d0);
        get_opt(d, "dx", l.disparity.dx);
        get_opt(d, "dy", l.disparity.dy);
    }
    get_opt(j, "albedo", l.albedo);
}

void to_json(json& j, const SceneSpec& s) {
    j = json{{"layers", s.layers},       {"ambient", s.ambient},     {"crosstalk", s.crosstalk},
             {"noise_sigma", s.noise_sigma}, {"quantize8", s.quantize8}, {"noise_seed", s.noise_seed}};
}

void from_json(const json& j, SceneSpec& s) {
    if (auto it = j.find("preset"); it != j.end()) {
        int w = j.value("width", 640);
        int h = j.value("height", 480);
        s = preset_scene(it->get<std::string>(), w, h);
    } else {
        s = SceneSpec{};
        j.at("layers").get_to(s.layers);
    }
    get_opt(j, "ambient", s.ambient);
    get_opt(j, "crosstalk", s.crosstalk);
    get_opt(j, "noise_sigma", s.noise_sigma);
    get_opt(j, "quantize8", s.quantize8);
    get_opt(j, "noise_seed", s.noise_seed);
}

void to_json(json& j, const PerturbParams& p) {
    j = json{{"gains", p.gains},           {"offsets", p.offsets}, {"crosstalk", p.crosstalk},
             {"noise_sigma", p.noise_sigma}, {"seed", p.seed},       {"quantize8", p.quantize8}};
}

void from_json(const json& j, PerturbParams& p) {
    get_opt(j, "gains", p.gains);
    get_opt(j, "offsets", p.offsets);
    get_opt(j, "crosstalk", p.crosstalk);
    get_opt(j, "noise_sigma", p.noise_sigma);
    get_opt(j, "seed", p.seed);
    get_opt(j, "quantize8", p.quantize8);
}

} // namespace rgbspeckle::sim

namespace rgbspeckle::matcher {

void to_json(json& j, const MatchParams& m) {
    j = json{{"d_min", m.d_min},
             {"d_max", m.d_max},
             {"radius", m.radius},
             {"mode", to_string(m.mode)},
             {"lr_threshold", write_threshold(m.lr_threshold)},
             {"subpixel", m.subpixel}};
}

void from_json(const json& j, MatchParams& m) {
    get_opt(j, "d_min", m.d_min);
    get_opt(j, "d_max", m.d_max);
    get_opt(j, "radius", m.radius);
    if (auto it = j.find("mode"); it != j.end()) m.mode = parse_mode(it->get<std::string>());
    m.lr_threshold = read_threshold(j, "lr_threshold", m.lr_threshold);
    get_opt(j, "subpixel", m.subpixel);
}

} // namespace rgbspeckle::matcher

namespace rgbspeckle::eval {

void to_json(json& j, const EvalReport& r) {
    j = json{{"epe", r.epe},
             {"d1", r.d1},
             {"d1_unit", "fraction"},
             {"n_evaluated", r.n_evaluated},
             {"n_missing", r.n_missing},
             {"threshold", r.threshold},
             {"penalize_missing", r.penalize_missing}};
}

void from_json(const json& j, EvalReport& r) {
    j.at("epe").get_to(r.epe);
    j.at("d1").get_to(r.d1);
    j.at("n_evaluated").get_to(r.n_evaluated);
    get_opt(j, "n_missing", r.n_missing);
    get_opt(j, "threshold", r.threshold);
    get_opt(j, "penalize_missing", r.penalize_missing);
}

} // namespace rgbspeckle::eval

namespace rgbspeckle {

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("config", "cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error("config", "invalid JSON in '" + path.string() + "': " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    io::write_text_file(path, j.dump(2) + "\n");
}

} // namespace rgbspeckle
