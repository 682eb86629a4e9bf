#include "rgbspeckle/pattern.hpp"

#include "rgbspeckle/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rgbspeckle {

float wrap_phase(double radians) {
    double r = std::remainder(radians, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    float f = static_cast<float>(r);
    if (f <= -kPiF) f = kPiF;
    if (f > kPiF) f = kPiF;
    return f;
}

PhaseField::PhaseField(GrayImage values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!in_wrapped_range(values_[i]))
            throw Error("pattern", "phase sample " + std::to_string(values_[i]) + " outside (-pi, pi]");
}

namespace pattern {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("pattern", msg); }

} // namespace

void PatternParams::validate() const {
    if (!(a >= 0.0 && a <= 1.0)) fail("background a must be in [0,1]");
    if (!(b >= 0.0 && b <= 1.0)) fail("amplitude b must be in [0,1]");
    if (a + b > 1.0 + 1e-12) fail("a + b must not exceed 1");
    if (a - b < -1e-12) fail("a - b must not be negative");
    if (period < 3) fail("fringe period must be >= 3, got " + std::to_string(period));
    if (lo_width < 1 || lo_height < 1) fail("low-resolution grid must be at least 1x1");
    if (upsample < 1) fail("upsample factor must be >= 1");
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::bounded(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % bound;
    }
}

Permutation Permutation::identity(std::size_t n) {
    Permutation p;
    p.map_.resize(n);
    std::iota(p.map_.begin(), p.map_.end(), 0u);
    return p;
}

Permutation::Permutation(std::vector<std::uint32_t> map) : map_(std::move(map)) {
    std::vector<unsigned char> seen(map_.size(), 0);
    for (auto v : map_) {
        if (v >= map_.size() || seen[v]) fail("permutation map is not a bijection");
        seen[v] = 1;
    }
}

Permutation Permutation::inverse() const {
    Permutation inv;
    inv.map_.resize(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv.map_[map_[i]] = static_cast<std::uint32_t>(i);
    return inv;
}

PhaseField gen_base_phase(int lo_width, int lo_height, int period) {
    if (period < 3) fail("fringe period must be >= 3, got " + std::to_string(period));
    PhaseField out(lo_width, lo_height);
    for (int y = 0; y < lo_height; ++y)
        for (int x = 0; x < lo_width; ++x) out.set(x, y, 2.0 * kPi * x / period);
    return out;
}

Permutation gen_permutation(std::size_t n, std::uint64_t seed) {
    if (n < 1) fail("permutation size must be >= 1");
    Permutation p = Permutation::identity(n);
    std::vector<std::uint32_t> map = p.map();
    SplitMix64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.bounded(i + 1));
        std::swap(map[i], map[j]);
    }
    return Permutation(std::move(map));
}

GrayImage scramble(const GrayImage& plane, const Permutation& perm) {
    if (perm.size() != plane.size())
        fail("permutation size " + std::to_string(perm.size()) + " does not match " + std::to_string(plane.size()) +
             " pixels");
    GrayImage out(plane.width(), plane.height());
    for (std::size_t i = 0; i < plane.size(); ++i) out[i] = plane[perm[i]];
    return out;
}

PhaseField scramble(const PhaseField& phase, const Permutation& perm) {
    return PhaseField(scramble(phase.values(), perm));
}

RgbImage scramble(const RgbImage& img, const Permutation& perm) {
    return RgbImage(scramble(img.r(), perm), scramble(img.g(), perm), scramble(img.b(), perm));
}

GrayImage upsample_block(const GrayImage& plane, int k) {
    if (k < 1) fail("upsample factor must be >= 1");
    GrayImage out(plane.width() * k, plane.height() * k);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x) out(x, y) = plane(x / k, y / k);
    return out;
}

PhaseField upsample_block(const PhaseField& phase, int k) { return PhaseField(upsample_block(phase.values(), k)); }

RgbImage compose_rgb(const PhaseField& phase, double a, double b) {
    if (!(a >= 0.0 && b >= 0.0) || a + b > 1.0 + 1e-12 || a - b < -1e-12)
        fail("compose_rgb requires a + b <= 1 and a - b >= 0");
    constexpr double kShift = 2.0 * kPi / 3.0;
    RgbImage out(phase.width(), phase.height());
    for (std::size_t i = 0; i < phase.size(); ++i) {
        const double phi = phase[i];
        out.r()[i] = static_cast<float>(a + b * std::cos(phi + kShift));
        out.g()[i] = static_cast<float>(a + b * std::cos(phi));
        out.b()[i] = static_cast<float>(a + b * std::cos(phi - kShift));
    }
    return out;
}

PhaseField speckle_phase(const PatternParams& params) {
    params.validate();
    const PhaseField base = gen_base_phase(params.lo_width, params.lo_height, params.period);
    const Permutation perm = gen_permutation(base.size(), params.seed);
    return upsample_block(scramble(base, perm), params.upsample);
}

RgbImage gen_speckle_pattern(const PatternParams& params) {
    return compose_rgb(speckle_phase(params), params.a, params.b);
}

} // namespace pattern
} // namespace rgbspeckle
