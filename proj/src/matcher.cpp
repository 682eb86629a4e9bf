#include "rgbspeckle/matcher.hpp"

#include "rgbspeckle/error.hpp"
#include "rgbspeckle/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace rgbspeckle::matcher {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("matcher", msg); }

constexpr double kInf = std::numeric_limits<double>::infinity();

GrayImage flip_x(const GrayImage& img) {
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) out(x, y) = img(img.width() - 1 - x, y);
    return out;
}

FeatureImage flip_x(const FeatureImage& f) {
    FeatureImage out;
    for (const auto& p : f.planes) out.planes.push_back(flip_x(p));
    return out;
}

DisparityMap flip_x(const DisparityMap& d) {
    DisparityMap out(d.width(), d.height());
    for (int y = 0; y < d.height(); ++y)
        for (int x = 0; x < d.width(); ++x) out(x, y) = d(d.width() - 1 - x, y);
    return out;
}

} // namespace

std::string to_string(Mode m) { return m == Mode::Rgb ? "rgb" : "phase"; }

Mode parse_mode(const std::string& s) {
    if (s == "rgb") return Mode::Rgb;
    if (s == "phase") return Mode::Phase;
    fail("unknown match mode '" + s + "' (expected rgb or phase)");
}

void MatchParams::validate(int width) const {
    if (d_min < 0 || d_min >= d_max || d_max >= width)
        fail("disparity range [" + std::to_string(d_min) + ", " + std::to_string(d_max) +
             "] must satisfy 0 <= d_min < d_max < width " + std::to_string(width));
    if (radius < 1 || radius > 15) fail("window radius must be in [1, 15], got " + std::to_string(radius));
    if (std::isnan(lr_threshold) || lr_threshold < 0) fail("lr threshold must be >= 0");
}

FeatureImage rgb_features(const RgbImage& img) { return FeatureImage{{img.r(), img.g(), img.b()}}; }

FeatureImage embed_phase(const ppn::PpnResult& p) {
    GrayImage c(p.phase.width(), p.phase.height());
    GrayImage s(p.phase.width(), p.phase.height());
    for (std::size_t i = 0; i < p.phase.size(); ++i) {
        if (!p.valid[i]) continue;
        c[i] = static_cast<float>(std::cos(static_cast<double>(p.phase[i])));
        s[i] = static_cast<float>(std::sin(static_cast<double>(p.phase[i])));
    }
    return FeatureImage{{std::move(c), std::move(s)}};
}

DisparityMap match(const FeatureImage& left, const FeatureImage& right, const MatchParams& params) {
    if (left.planes.empty() || left.planes.size() != right.planes.size())
        fail("left and right features must have the same non-zero plane count");
    for (std::size_t k = 0; k < left.planes.size(); ++k)
        if (!left.planes[k].same_shape(left.planes[0]) || !right.planes[k].same_shape(left.planes[0]))
            fail("feature planes have mismatched dimensions");
    const int w = left.width();
    const int h = left.height();
    params.validate(w);
    const int r = params.radius;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    std::vector<double> pixel_cost(n), row_sum(n), agg(n), prev(n, kInf);
    std::vector<double> best(n, kInf), cost_minus(n, kInf), cost_plus(n, kInf);
    std::vector<int> best_d(n, -1);

    for (int d = params.d_min; d <= params.d_max; ++d) {
        // per-pixel SSD; columns x < d have no partner
        parallel_for(h, [&](int y) {
            for (int x = 0; x < w; ++x) {
                double c = kInf;
                if (x - d >= 0) {
                    c = 0.0;
                    for (std::size_t k = 0; k < left.planes.size(); ++k) {
                        const double diff =
                            static_cast<double>(left.planes[k](x, y)) - right.planes[k](x - d, y);
                        c += diff * diff;
                    }
                }
                pixel_cost[static_cast<std::size_t>(y) * w + x] = c;
            }
        });
        parallel_for(h, [&](int y) {
            for (int x = 0; x < w; ++x) {
                double s = kInf;
                if (x - r >= d && x + r < w) {
                    s = 0.0;
                    for (int k = -r; k <= r; ++k) s += pixel_cost[static_cast<std::size_t>(y) * w + x + k];
                }
                row_sum[static_cast<std::size_t>(y) * w + x] = s;
            }
        });
        parallel_for(h, [&](int y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                double s = kInf;
                if (y - r >= 0 && y + r < h && std::isfinite(row_sum[i])) {
                    s = 0.0;
                    for (int k = -r; k <= r; ++k) s += row_sum[static_cast<std::size_t>(y + k) * w + x];
                }
                agg[i] = s;
                if (best_d[i] == d - 1) cost_plus[i] = s;
                if (s < best[i]) {
                    best[i] = s;
                    best_d[i] = d;
                    cost_minus[i] = d > params.d_min ? prev[i] : kInf;
                    cost_plus[i] = kInf;
                }
                prev[i] = s;
            }
        });
    }

    DisparityMap out(w, h);
    for (std::size_t i = 0; i < n; ++i) {
        if (best_d[i] < 0 || !std::isfinite(best[i])) continue;
        double disp = best_d[i];
        if (params.subpixel && std::isfinite(cost_minus[i]) && std::isfinite(cost_plus[i])) {
            const double denom = cost_minus[i] - 2.0 * best[i] + cost_plus[i];
            if (denom > 0.0) disp += std::clamp((cost_minus[i] - cost_plus[i]) / (2.0 * denom), -0.5, 0.5);
        }
        out[i] = static_cast<float>(std::max(0.0, disp));
    }
    return out;
}

DisparityMap match_right_view(const FeatureImage& left, const FeatureImage& right, const MatchParams& params) {
    return flip_x(match(flip_x(right), flip_x(left), params));
}

DisparityMap lr_check(const DisparityMap& d_left, const DisparityMap& d_right, double lr_threshold) {
    if (d_left.width() != d_right.width() || d_left.height() != d_right.height())
        fail("left and right disparity maps differ in size");
    if (std::isinf(lr_threshold)) return d_left;
    DisparityMap out = d_left;
    const int w = d_left.width();
    for (int y = 0; y < d_left.height(); ++y) {
        for (int x = 0; x < w; ++x) {
            const float dl = d_left(x, y);
            if (is_invalid(dl)) continue;
            const long t = x - std::lround(dl);
            if (t < 0 || t >= w || is_invalid(d_right(static_cast<int>(t), y)) ||
                std::abs(dl - d_right(static_cast<int>(t), y)) > lr_threshold)
                out(x, y) = kInvalidDisparity;
        }
    }
    return out;
}

DisparityMap match_views(const RgbImage& left, const RgbImage& right, const MatchParams& params,
                         double mod_threshold) {
    FeatureImage fl, fr;
    if (params.mode == Mode::Phase) {
        const auto [pl, pr] = ppn::decode_pair(left, right, mod_threshold);
        fl = embed_phase(pl);
        fr = embed_phase(pr);
    } else {
        fl = rgb_features(left);
        fr = rgb_features(right);
    }
    DisparityMap dl = match(fl, fr, params);
    if (std::isinf(params.lr_threshold)) return dl;
    return lr_check(dl, match_right_view(fl, fr, params), params.lr_threshold);
}

} // namespace rgbspeckle::matcher
