#include "rgbspeckle/error.hpp"
#include "rgbspeckle/pattern.hpp"
#include "rgbspeckle/ppn.hpp"
#include "rgbspeckle/simulator.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace rgbspeckle;

namespace {

double wrapped_diff(double a, double b) { return std::remainder(a - b, 2.0 * kPi); }

// Row of `n` evenly spaced phases covering (-pi, pi).
PhaseField phase_grid(int n) {
    PhaseField f(n, 1);
    for (int i = 0; i < n; ++i) f.set(i, 0, -kPi + 2.0 * kPi * (i + 0.5) / n);
    return f;
}

RgbImage crop(const RgbImage& img, int x0, int y0, int w, int h) {
    RgbImage out(w, h);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.plane(c)(x, y) = img.plane(c)(x0 + x, y0 + y);
    return out;
}

RgbImage affine(const RgbImage& img, float alpha, float beta) {
    RgbImage out = img;
    for (int c = 0; c < 3; ++c)
        for (auto& v : out.plane(c).data()) v = alpha * v + beta;
    return out;
}

// Angle of (num, sqrt(3) * den), recovered from a decode result. The sqrt(3)
// rescaling makes the channel-difference vector isotropic in the fringe phase.
double isotropic_angle(const ppn::PpnResult& r, std::size_t i) {
    const double m = r.modulation[i];
    const double num = m * std::sin(r.phase[i]);
    const double den = m * std::cos(r.phase[i]);
    return std::atan2(num, std::sqrt(3.0) * den);
}

RgbImage speckle(int lo_w, int lo_h, std::uint64_t seed) {
    pattern::PatternParams p;
    p.lo_width = lo_w;
    p.lo_height = lo_h;
    p.upsample = 1;
    p.seed = seed;
    return pattern::gen_speckle_pattern(p);
}

} // namespace

namespace {

// a = 0.2, b = 0.3 at phi = 0: (R, G, B) = (0.05, 0.5, 0.05).
RgbImage ideal_pixel() {
    RgbImage img(1, 1);
    img.r()(0, 0) = 0.05f;
    img.g()(0, 0) = 0.5f;
    img.b()(0, 0) = 0.05f;
    return img;
}

} // namespace

TEST_CASE("decode: ideal encoding a=0.2, b=0.3, phi=0") {
    const RgbImage img = ideal_pixel();
    const auto r = ppn::decode(img);
    CHECK(r.phase(0, 0) == doctest::Approx(kPi / 2).epsilon(1e-6));
    CHECK(r.modulation(0, 0) == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(r.valid(0, 0));
}

TEST_CASE("decode: flat gray is invalid with phase 0") {
    const RgbImage img(4, 3, 0.4f);
    const auto r = ppn::decode(img);
    CHECK(r.valid.count() == 0);
    for (std::size_t i = 0; i < r.phase.size(); ++i) {
        CHECK(r.phase[i] == 0.0f);
        CHECK(r.modulation[i] == 0.0f);
    }
}

TEST_CASE("decode: threshold boundary and errors") {
    const RgbImage img = ideal_pixel();
    const double m = ppn::decode(img).modulation(0, 0);
    CHECK_FALSE(ppn::decode(img, m).valid(0, 0));  // strict inequality
    CHECK(ppn::decode(img, 0.0).valid(0, 0));
    CHECK(ppn::decode(img, std::numeric_limits<double>::infinity()).valid.count() == 0);
    CHECK_THROWS_AS(ppn::decode(img, -1.0), Error);
    RgbImage bad(2, 2);
    bad.b() = GrayImage(3, 2);
    CHECK_THROWS_AS(ppn::decode(bad), Error);
}

TEST_CASE("decode matches the closed form atan2(3b cos phi, -sqrt3 b sin phi)") {
    const double a = 0.5, b = 0.45;
    const PhaseField phi = phase_grid(4096);
    const auto r = ppn::decode(pattern::compose_rgb(phi, a, b));
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double expect = std::atan2(3 * b * std::cos(phi[i]), -std::sqrt(3.0) * b * std::sin(phi[i]));
        CHECK(std::abs(wrapped_diff(r.phase[i], expect)) <= 1e-5);
        CHECK(r.modulation[i] >= 0.0f);
        CHECK(in_wrapped_range(r.phase[i]));
    }
}

TEST_CASE("decode is invariant to per-pixel affine illumination") {
    const RgbImage img = speckle(64, 32, 3);
    const auto base = ppn::decode(img);
    for (auto [alpha, beta] : {std::pair{2.0f, 0.05f}, std::pair{0.5f, -0.1f}, std::pair{1.7f, 0.3f}}) {
        const auto r = ppn::decode(affine(img, alpha, beta));
        for (std::size_t i = 0; i < r.phase.size(); ++i) {
            if (!base.valid[i]) continue;
            CHECK(std::abs(wrapped_diff(r.phase[i], base.phase[i])) <= 1e-6);
            CHECK(r.modulation[i] == doctest::Approx(alpha * base.modulation[i]).epsilon(1e-5));
        }
    }
}

TEST_CASE("decode_pair") {
    const RgbImage img = speckle(40, 20, 8);
    SUBCASE("identical views") {
        const auto [l, r] = ppn::decode_pair(img, img);
        CHECK(l.phase == r.phase);
        CHECK(l.valid == r.valid);
        CHECK(l.modulation == r.modulation);
    }
    SUBCASE("channel-uniform gain on the left only") {
        const auto [l, r] = ppn::decode_pair(affine(img, 1.6f, 0.0f), img);
        for (std::size_t i = 0; i < l.phase.size(); ++i)
            if (l.valid[i] && r.valid[i]) CHECK(std::abs(wrapped_diff(l.phase[i], r.phase[i])) <= 1e-6);
    }
    SUBCASE("infinite threshold") {
        const auto [l, r] = ppn::decode_pair(img, img, std::numeric_limits<double>::infinity());
        CHECK(l.valid.count() == 0);
        CHECK(r.valid.count() == 0);
    }
}

TEST_CASE("ChannelOrder parsing") {
    CHECK(ppn::ChannelOrder::parse("rgb") == ppn::ChannelOrder{});
    CHECK(ppn::ChannelOrder::parse("BRG").source == std::array<int, 3>{2, 0, 1});
    for (const auto& o : ppn::ChannelOrder::all()) CHECK(ppn::ChannelOrder::parse(o.name()) == o);
    CHECK(ppn::ChannelOrder::all()[0] == ppn::ChannelOrder{});
    CHECK_THROWS_AS(ppn::ChannelOrder::parse("rrg"), Error);
    CHECK_THROWS_AS(ppn::ChannelOrder::parse("rgba"), Error);
}

TEST_CASE("channel_permute_decode") {
    const double a = 0.5, b = 0.45;
    const PhaseField phi = phase_grid(4096);
    const RgbImage ideal = pattern::compose_rgb(phi, a, b);
    const auto base = ppn::decode(ideal);

    SUBCASE("identity order equals decode") {
        const auto r = ppn::channel_permute_decode(ideal, ppn::ChannelOrder{});
        CHECK(r.phase == base.phase);
        CHECK(r.modulation == base.modulation);
    }

    SUBCASE("cyclic shifts rotate the isotropic channel-difference angle by a constant") {
        for (const char* name : {"brg", "gbr"}) {
            const auto r = ppn::channel_permute_decode(ideal, ppn::ChannelOrder::parse(name));
            const double offset = wrapped_diff(isotropic_angle(r, 0), isotropic_angle(base, 0));
            CHECK(std::abs(std::abs(offset) - 2.0 * kPi / 3.0) <= 1e-5);
            double spread = 0;
            for (std::size_t i = 0; i < phi.size(); ++i) {
                const double d = wrapped_diff(isotropic_angle(r, i), isotropic_angle(base, i));
                spread = std::max(spread, std::abs(wrapped_diff(d, offset)));
            }
            CHECK(spread <= 1e-5);
        }
    }

    SUBCASE("the verbatim decode reparametrizes cyclic shifts non-uniformly") {
        const auto r = ppn::channel_permute_decode(ideal, ppn::ChannelOrder::parse("brg"));
        double lo = 10, hi = -10;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double d = wrapped_diff(r.phase[i], base.phase[i]);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        CHECK(hi - lo > 0.5);
    }

    SUBCASE("every order keeps the decoded phase injective over the fringe") {
        for (const auto& order : ppn::ChannelOrder::all()) {
            const auto r = ppn::channel_permute_decode(ideal, order);
            std::vector<float> v(r.phase.values().data().begin(), r.phase.values().data().end());
            std::sort(v.begin(), v.end());
            CHECK(std::adjacent_find(v.begin(), v.end()) == v.end());
            CHECK(r.valid.count() == phi.size());
        }
    }
}

TEST_CASE("decode is per-pixel local under cropping") {
    const RgbImage img = speckle(50, 30, 12);
    const auto full = ppn::decode(img);
    const auto part = ppn::decode(crop(img, 7, 5, 20, 11));
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 20; ++x) {
            CHECK(part.phase(x, y) == full.phase(x + 7, y + 5));
            CHECK(part.modulation(x, y) == full.modulation(x + 7, y + 5));
            CHECK(part.valid(x, y) == full.valid(x + 7, y + 5));
        }
}

TEST_CASE("equal channel albedo leaves the rendered phase unchanged") {
    sim::RigSpec rig;
    rig.width = 96;
    rig.height = 40;
    const RgbImage pat = speckle(120, 40, 4);
    sim::SceneSpec unit;
    unit.layers = {sim::Layer{std::nullopt, sim::DisparityPlane{6.0, 0.0, 0.0}, {1, 1, 1}}};
    const auto ref = ppn::decode(sim::render(unit, rig, pat).left);
    for (double albedo : {0.3, 0.75, 1.4}) {
        sim::SceneSpec s = unit;
        s.layers[0].albedo = {albedo, albedo, albedo};
        s.ambient = {0.04, 0.04, 0.04};
        const auto r = ppn::decode(sim::render(s, rig, pat).left);
        for (std::size_t i = 0; i < r.phase.size(); ++i) {
            if (!ref.valid[i]) continue;
            CHECK(std::abs(wrapped_diff(r.phase[i], ref.phase[i])) <= 1e-6);
        }
    }
}
