#include "rgbspeckle/error.hpp"
#include "rgbspeckle/io.hpp"
#include "rgbspeckle/pattern.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

using namespace rgbspeckle;
using namespace rgbspeckle::pattern;

TEST_CASE("wrap_phase maps into (-pi, pi]") {
    CHECK(wrap_phase(kPi) == kPiF);
    CHECK(wrap_phase(-kPi) == kPiF);
    CHECK(wrap_phase(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
    for (int k = -50; k <= 50; ++k) CHECK(in_wrapped_range(wrap_phase(0.37 * k)));
}

TEST_CASE("gen_base_phase") {
    const PhaseField f = gen_base_phase(16, 3, 8);
    CHECK(f(0, 0) == 0.0f);
    CHECK(f(2, 0) == doctest::Approx(kPi / 2.0));
    CHECK(f(6, 0) == doctest::Approx(-kPi / 2.0));
    CHECK(f(4, 1) == kPiF);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 16; ++x) CHECK(f(x, y) == f(x, 0));
    CHECK_THROWS_AS(gen_base_phase(16, 3, 2), Error);
}

TEST_CASE("SplitMix64 reference outputs") {
    // Reference values of the published SplitMix64 for seed 0.
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next() == 0x06C45D188009454FULL);
}

TEST_CASE("gen_permutation is a deterministic bijection") {
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xDEADBEEFULL}) {
        for (std::size_t n : {1u, 2u, 7u, 1000u}) {
            const auto p = gen_permutation(n, seed);
            auto sorted = p.map();
            std::sort(sorted.begin(), sorted.end());
            std::vector<std::uint32_t> expect(n);
            std::iota(expect.begin(), expect.end(), 0u);
            CHECK(sorted == expect);
            CHECK(gen_permutation(n, seed) == p);
        }
    }
    CHECK_THROWS_AS(gen_permutation(0, 1), Error);
    CHECK_THROWS_AS(Permutation({0, 0, 1}), Error);
}

TEST_CASE("gen_permutation fixed points average about one (Monte Carlo)") {
    constexpr std::size_t n = 10000;
    double fixed = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = gen_permutation(n, seed);
        for (std::size_t i = 0; i < n; ++i) fixed += p[i] == i;
    }
    const double fraction = fixed / 100.0 / n;
    CHECK(fraction >= 0.2 / n);
    CHECK(fraction <= 5.0 / n);
}

TEST_CASE("scramble") {
    const PhaseField base = gen_base_phase(12, 5, 6);
    SUBCASE("identity") { CHECK(scramble(base, Permutation::identity(base.size())) == base); }
    SUBCASE("perm then inverse") {
        const auto p = gen_permutation(base.size(), 9);
        CHECK(scramble(scramble(base, p), p.inverse()) == base);
    }
    SUBCASE("value multiset preserved") {
        const auto p = gen_permutation(base.size(), 77);
        const auto out = scramble(base, p);
        std::vector<float> a(base.values().data().begin(), base.values().data().end());
        std::vector<float> b(out.values().data().begin(), out.values().data().end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == base[p[i]]);
    }
    SUBCASE("size mismatch") { CHECK_THROWS_AS(scramble(base, Permutation::identity(3)), Error); }
}

TEST_CASE("upsample_block") {
    const PhaseField base = scramble(gen_base_phase(5, 4, 4), gen_permutation(20, 5));
    CHECK(upsample_block(base, 1) == base);
    for (int k : {2, 3}) {
        const auto up = upsample_block(base, k);
        REQUIRE(up.width() == 5 * k);
        REQUIRE(up.height() == 4 * k);
        for (int y = 0; y < up.height(); ++y)
            for (int x = 0; x < up.width(); ++x) CHECK(up(x, y) == base(x / k, y / k));
    }
    CHECK_THROWS_AS(upsample_block(base, 0), Error);
}

TEST_CASE("compose_rgb") {
    SUBCASE("phi = 0, a = b = 0.5") {
        PhaseField f(1, 1);
        const auto img = compose_rgb(f, 0.5, 0.5);
        CHECK(img.r()(0, 0) == doctest::Approx(0.25));
        CHECK(img.g()(0, 0) == doctest::Approx(1.0));
        CHECK(img.b()(0, 0) == doctest::Approx(0.25));
    }
    SUBCASE("zero amplitude gives constant planes") {
        const auto img = compose_rgb(gen_base_phase(9, 2, 3), 0.3, 0.0);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < img.r().size(); ++i) CHECK(img.plane(c)[i] == doctest::Approx(0.3));
    }
    SUBCASE("channel sum is 3a and samples stay in [0,1]") {
        const auto img = compose_rgb(gen_base_phase(64, 1, 64), 0.5, 0.45);
        for (std::size_t i = 0; i < img.r().size(); ++i) {
            const double s = double(img.r()[i]) + img.g()[i] + img.b()[i];
            CHECK(s == doctest::Approx(1.5).epsilon(1e-6));
            for (int c = 0; c < 3; ++c) {
                CHECK(img.plane(c)[i] >= 0.0f);
                CHECK(img.plane(c)[i] <= 1.0f);
            }
        }
    }
    SUBCASE("blue lags, red leads by 2pi/3") {
        PhaseField f(1, 1);
        f.set(0, 0, 2.0 * kPi / 3.0);
        const auto img = compose_rgb(f, 0.5, 0.4);
        CHECK(img.b()(0, 0) == doctest::Approx(0.9));  // cos(0)
    }
    SUBCASE("range violations") {
        PhaseField f(1, 1);
        CHECK_THROWS_AS(compose_rgb(f, 0.7, 0.4), Error);
        CHECK_THROWS_AS(compose_rgb(f, 0.2, 0.3), Error);
    }
}

TEST_CASE("scramble commutes with channel composition") {
    const PhaseField base = gen_base_phase(10, 6, 5);
    const auto p = gen_permutation(base.size(), 123);
    const auto a = compose_rgb(scramble(base, p), 0.5, 0.45);
    const auto b = scramble(compose_rgb(base, 0.5, 0.45), p);
    CHECK(a == b);
    const auto up_a = compose_rgb(upsample_block(base, 3), 0.5, 0.45);
    const auto c = compose_rgb(base, 0.5, 0.45);
    const RgbImage up_b(upsample_block(c.r(), 3), upsample_block(c.g(), 3), upsample_block(c.b(), 3));
    CHECK(up_a == up_b);
}

TEST_CASE("gen_speckle_pattern") {
    PatternParams p;
    p.lo_width = 40;
    p.lo_height = 20;
    p.upsample = 3;
    const auto img = gen_speckle_pattern(p);
    CHECK(img.width() == 120);
    CHECK(img.height() == 60);

    SUBCASE("byte-identical PNG on repeat") {
        const auto dir = testutil::scratch_dir("pattern_png");
        io::write_png(img, dir / "a.png");
        io::write_png(gen_speckle_pattern(p), dir / "b.png");
        CHECK(io::read_file_bytes(dir / "a.png") == io::read_file_bytes(dir / "b.png"));
    }

    SUBCASE("validation") {
        PatternParams bad = p;
        bad.a = 0.6;
        bad.b = 0.5;
        CHECK_THROWS_AS(gen_speckle_pattern(bad), Error);
        bad = p;
        bad.period = 2;
        CHECK_THROWS_AS(gen_speckle_pattern(bad), Error);
        bad = p;
        bad.upsample = 0;
        CHECK_THROWS_AS(gen_speckle_pattern(bad), Error);
    }
}

namespace {

double differing_fraction(const RgbImage& a, const RgbImage& b) {
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.r().size(); ++i)
        diff += a.r()[i] != b.r()[i] || a.g()[i] != b.g()[i] || a.b()[i] != b.b()[i];
    return static_cast<double>(diff) / a.r().size();
}

} // namespace

TEST_CASE("different seeds decorrelate the pattern") {
    // Two independent scrambles agree at a pixel with probability sum_i p_i^2
    // over the fringe's phase levels (each of the `period` levels is equally
    // frequent when lo_width is a multiple of the period).
    SUBCASE("many phase levels: >= 99% of pixels differ") {
        PatternParams p;
        p.period = 160;
        p.lo_width = 320;
        p.lo_height = 90;
        p.upsample = 2;
        double mean = 0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            PatternParams q = p;
            p.seed = 1000 + 2 * s;
            q.seed = 1001 + 2 * s;
            mean += differing_fraction(gen_speckle_pattern(p), gen_speckle_pattern(q)) / 10.0;
        }
        CHECK(mean >= 0.99);
    }
    SUBCASE("default 8-level fringe matches the collision oracle 1 - 1/8") {
        PatternParams p;
        PatternParams q = p;
        q.seed = p.seed + 1;
        const double f = differing_fraction(gen_speckle_pattern(p), gen_speckle_pattern(q));
        CHECK(f == doctest::Approx(1.0 - 1.0 / 8.0).epsilon(0.02));
    }
}
