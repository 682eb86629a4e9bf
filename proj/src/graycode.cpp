#include "rgbspeckle/graycode.hpp"

#include "rgbspeckle/error.hpp"
#include "rgbspeckle/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace rgbspeckle::graycode {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("graycode", msg); }

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

int bit_of(std::uint64_t v, int i) { return static_cast<int>((v >> i) & 1u); }

// Index of the single bit that differs between the codes of c and c + 1.
int flip_bit(std::uint64_t c) { return std::countr_zero(gray_encode(c) ^ gray_encode(c + 1)); }

} // namespace

std::uint64_t gray_encode(std::uint64_t v) { return v ^ (v >> 1); }

std::uint64_t gray_decode(std::uint64_t g) {
    for (int shift = 1; shift < 64; shift <<= 1) g ^= g >> shift;
    return g;
}

int bits_for_width(int proj_width) {
    if (proj_width < 1) fail("projector width must be positive");
    int n = 0;
    while ((std::uint64_t{1} << n) < static_cast<std::uint64_t>(proj_width)) ++n;
    return std::max(n, 1);
}

void GraycodeStack::validate() const {
    if (n_bits < 1 || n_bits > 30) fail("n_bits must be in [1, 30]");
    if (frames.size() != static_cast<std::size_t>(2 * n_bits + 2))
        fail("stack has " + std::to_string(frames.size()) + " frames, expected " + std::to_string(2 * n_bits + 2));
    for (const auto& f : frames)
        if (!f.same_shape(frames.front())) fail("stack frames have mismatched dimensions");
    if (proj_width < 1 || (std::uint64_t{1} << n_bits) < static_cast<std::uint64_t>(proj_width))
        fail("projector width " + std::to_string(proj_width) + " needs more than " + std::to_string(n_bits) +
             " bits");
}

GraycodeStack gen_stack(int proj_width, int proj_height, int n_bits) {
    if (proj_width < 1 || proj_height < 1) fail("projector size must be positive");
    if (n_bits < 1 || n_bits > 30 || (std::uint64_t{1} << n_bits) < static_cast<std::uint64_t>(proj_width))
        fail("insufficient bits: 2^" + std::to_string(n_bits) + " < " + std::to_string(proj_width));
    GraycodeStack stack{n_bits, proj_width, {}};
    stack.frames.reserve(2 * n_bits + 2);
    for (int i = 0; i < n_bits; ++i) {
        GrayImage code(proj_width, proj_height), inv(proj_width, proj_height);
        for (int y = 0; y < proj_height; ++y)
            for (int x = 0; x < proj_width; ++x) {
                const int bit = bit_of(gray_encode(static_cast<std::uint64_t>(x)), i);
                code(x, y) = static_cast<float>(bit);
                inv(x, y) = static_cast<float>(1 - bit);
            }
        stack.frames.push_back(std::move(code));
        stack.frames.push_back(std::move(inv));
    }
    stack.frames.emplace_back(proj_width, proj_height, 1.0f);
    stack.frames.emplace_back(proj_width, proj_height, 0.0f);
    return stack;
}

CoordMap decode_stack(const GraycodeStack& captured, double contrast_threshold, Subpixel mode) {
    captured.validate();
    const int w = captured.width();
    const int h = captured.height();
    const int n = captured.n_bits;
    const std::uint64_t top = std::uint64_t{1} << n;
    CoordMap out{GrayImage(w, h, kNaN), ValidityMask(w, h, false)};
    std::vector<std::int64_t> columns(static_cast<std::size_t>(w) * h, -1);

    parallel_for(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const double contrast = captured.white()(x, y) - captured.black()(x, y);
            if (!(contrast >= contrast_threshold) || contrast <= 0.0) continue;
            std::uint64_t code = 0;
            for (int i = 0; i < n; ++i)
                if (captured.code(i)(x, y) > captured.inverse(i)(x, y)) code |= std::uint64_t{1} << i;
            const std::uint64_t c = gray_decode(code);
            if (c >= static_cast<std::uint64_t>(captured.proj_width)) continue;
            columns[static_cast<std::size_t>(y) * w + x] = static_cast<std::int64_t>(c);

            if (mode != Subpixel::Edge) continue;
            // fraction of the way towards a neighbouring column, from the
            // normalized level of the bit that flips towards it
            auto toward = [&](std::uint64_t from, std::uint64_t neighbour_low) {
                const int j = flip_bit(neighbour_low);
                const double level =
                    0.5 + 0.5 * (captured.code(j)(x, y) - captured.inverse(j)(x, y)) / contrast;
                const double f = bit_of(gray_encode(from), j) ? 1.0 - level : level;
                return std::clamp(f, 0.0, 0.5);
            };
            double coord = static_cast<double>(c);
            if (c + 1 < top) coord += toward(c, c);
            if (c > 0) coord -= toward(c, c - 1);
            out.coord(x, y) = static_cast<float>(coord);
            out.valid.set(x, y, true);
        }
    });

    if (mode == Subpixel::Run) {
        parallel_for(h, [&](int y) {
            const std::int64_t* row = columns.data() + static_cast<std::size_t>(y) * w;
            int x = 0;
            while (x < w) {
                if (row[x] < 0) {
                    ++x;
                    continue;
                }
                int end = x + 1;
                while (end < w && row[end] == row[x]) ++end;
                const int len = end - x;
                for (int i = 0; i < len; ++i) {
                    out.coord(x + i, y) = static_cast<float>(row[x] - 0.5 + (i + 0.5) / len);
                    out.valid.set(x + i, y, true);
                }
                x = end;
            }
        });
    }
    return out;
}

DisparityMap gt_from_stereo(const CoordMap& left, const CoordMap& right) {
    if (left.height() != right.height()) fail("coordinate maps differ in height");
    const int wl = left.width();
    const int wr = right.width();
    DisparityMap out(wl, left.height());

    parallel_for(left.height(), [&](int y) {
        struct Bracket {
            int j;
            float lo, hi;
        };
        std::vector<Bracket> brackets;
        for (int j = 0; j + 1 < wr; ++j) {
            if (!right.valid(j, y) || !right.valid(j + 1, y)) continue;
            const float lo = right.coord(j, y);
            const float hi = right.coord(j + 1, y);
            if (hi > lo) brackets.push_back({j, lo, hi});
        }
        for (int x = 0; x < wl; ++x) {
            if (!left.valid(x, y)) continue;
            const float c = left.coord(x, y);
            int hits = 0;
            double xr = 0;
            for (const auto& b : brackets) {
                if (b.lo <= c && c < b.hi) {
                    ++hits;
                    xr = b.j + static_cast<double>(c - b.lo) / (b.hi - b.lo);
                }
            }
            if (hits == 0) {
                // exact hit on a sample that closes a row segment
                for (int j = 0; j < wr; ++j) {
                    if (right.valid(j, y) && right.coord(j, y) == c) {
                        ++hits;
                        xr = j;
                    }
                }
            }
            if (hits != 1) continue;
            const double d = x - xr;
            if (d >= 0.0) out(x, y) = static_cast<float>(d);
        }
    });
    return out;
}

std::pair<GraycodeStack, GraycodeStack> capture_stack(const GraycodeStack& stack, const sim::SceneSpec& scene,
                                                      const sim::RigSpec& rig) {
    stack.validate();
    GraycodeStack left{stack.n_bits, stack.proj_width, {}};
    GraycodeStack right{stack.n_bits, stack.proj_width, {}};
    auto to_gray = [](const RgbImage& img) {
        GrayImage g(img.width(), img.height());
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] = static_cast<float>((static_cast<double>(img.r()[i]) + img.g()[i] + img.b()[i]) / 3.0);
        return g;
    };
    for (std::size_t k = 0; k < stack.frames.size(); ++k) {
        sim::SceneSpec frame_scene = scene;
        frame_scene.noise_seed = scene.noise_seed + k;
        const auto& f = stack.frames[k];
        const auto rendered = sim::render(frame_scene, rig, RgbImage(f, f, f));
        left.frames.push_back(to_gray(rendered.left));
        right.frames.push_back(to_gray(rendered.right));
    }
    return {std::move(left), std::move(right)};
}

} // namespace rgbspeckle::graycode
