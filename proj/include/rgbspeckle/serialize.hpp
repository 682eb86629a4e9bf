#pragma once

#include "rgbspeckle/eval.hpp"
#include "rgbspeckle/matcher.hpp"
#include "rgbspeckle/pattern.hpp"
#include "rgbspeckle/simulator.hpp"

#include <json.hpp>

#include <filesystem>

// JSON mappings for configs, manifests and reports. Missing keys take the
// struct defaults; unknown keys are ignored.

namespace rgbspeckle::pattern {
void to_json(nlohmann::json& j, const PatternParams& p);
void from_json(const nlohmann::json& j, PatternParams& p);
} // namespace rgbspeckle::pattern

namespace rgbspeckle::sim {
void to_json(nlohmann::json& j, const RigSpec& r);
void from_json(const nlohmann::json& j, RigSpec& r);
void to_json(nlohmann::json& j, const Layer& l);
void from_json(const nlohmann::json& j, Layer& l);
/// Accepts either a full layer list or {"preset": name, "width", "height"}
/// plus optional overrides of ambient/crosstalk/noise_sigma/quantize8/noise_seed.
void to_json(nlohmann::json& j, const SceneSpec& s);
void from_json(const nlohmann::json& j, SceneSpec& s);
void to_json(nlohmann::json& j, const PerturbParams& p);
void from_json(const nlohmann::json& j, PerturbParams& p);
} // namespace rgbspeckle::sim

namespace rgbspeckle::matcher {
void to_json(nlohmann::json& j, const MatchParams& m);
void from_json(const nlohmann::json& j, MatchParams& m);
} // namespace rgbspeckle::matcher

namespace rgbspeckle::eval {
/// Scalar fields only; the error map travels as a separate image.
void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);
} // namespace rgbspeckle::eval

namespace rgbspeckle {
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
} // namespace rgbspeckle
