#include "rgbspeckle/colormap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rgbspeckle::colormap {

namespace {

constexpr std::array<std::array<float, 3>, 5> kJetStops{{
    {0.0f, 0.0f, 0.5f},
    {0.0f, 0.5f, 1.0f},
    {0.5f, 1.0f, 0.5f},
    {1.0f, 0.5f, 0.0f},
    {0.5f, 0.0f, 0.0f},
}};

template <class Field>
RgbImage apply(const Field& values, float lo, float hi) {
    RgbImage out(values.width(), values.height());
    const float span = hi > lo ? hi - lo : 1.0f;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto c = jet((values[i] - lo) / span);
        for (int k = 0; k < 3; ++k) out.plane(k)[i] = c[k];
    }
    return out;
}

} // namespace

std::array<float, 3> jet(float t) {
    if (std::isnan(t)) return {0.0f, 0.0f, 0.0f};
    const float s = std::clamp(t, 0.0f, 1.0f) * 4.0f;
    const int i = std::min(static_cast<int>(s), 3);
    const float f = s - static_cast<float>(i);
    std::array<float, 3> c{};
    for (int k = 0; k < 3; ++k) c[k] = kJetStops[i][k] + f * (kJetStops[i + 1][k] - kJetStops[i][k]);
    return c;
}

RgbImage apply_jet(const GrayImage& values, float lo, float hi) { return apply(values, lo, hi); }
RgbImage apply_jet(const DisparityMap& values, float lo, float hi) { return apply(values, lo, hi); }

RgbImage phase_to_hue(const GrayImage& phase, const ValidityMask& valid) {
    RgbImage out(phase.width(), phase.height());
    for (std::size_t i = 0; i < phase.size(); ++i) {
        if (!valid[i]) continue;
        const float h = static_cast<float>((phase[i] + std::numbers::pi) / (2.0 * std::numbers::pi)) * 6.0f;
        const int sector = static_cast<int>(std::floor(h)) % 6;
        const float f = h - std::floor(h);
        const float q = 1.0f - f;
        float r = 0, g = 0, b = 0;
        switch (sector) {
        case 0: r = 1; g = f; b = 0; break;
        case 1: r = q; g = 1; b = 0; break;
        case 2: r = 0; g = 1; b = f; break;
        case 3: r = 0; g = q; b = 1; break;
        case 4: r = f; g = 0; b = 1; break;
        default: r = 1; g = 0; b = q; break;
        }
        out.r()[i] = r;
        out.g()[i] = g;
        out.b()[i] = b;
    }
    return out;
}

} // namespace rgbspeckle::colormap
