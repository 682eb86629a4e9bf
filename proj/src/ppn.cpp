#include "rgbspeckle/ppn.hpp"

#include "rgbspeckle/error.hpp"
#include "rgbspeckle/parallel.hpp"

#include <cctype>
#include <cmath>

namespace rgbspeckle::ppn {

PpnResult decode(const RgbImage& img, double mod_threshold) {
    if (!img.r().same_shape(img.g()) || !img.r().same_shape(img.b()))
        throw Error("ppn", "RGB planes have mismatched dimensions");
    if (std::isnan(mod_threshold) || mod_threshold < 0.0)
        throw Error("ppn", "modulation threshold must be >= 0");

    const int w = img.width();
    const int h = img.height();
    GrayImage phase(w, h);
    GrayImage modulation(w, h);
    ValidityMask valid(w, h, false);
    parallel_for(h, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const double r = img.r()(x, y);
            const double g = img.g()(x, y);
            const double b = img.b()(x, y);
            const double num = 2.0 * g - r - b;
            const double den = r - b;
            if (num == 0.0 && den == 0.0) continue;
            const float m = static_cast<float>(std::hypot(num, den));
            phase(x, y) = wrap_phase(std::atan2(num, den));
            modulation(x, y) = m;
            valid.set(x, y, m > mod_threshold);
        }
    });
    return {PhaseField(std::move(phase)), std::move(modulation), std::move(valid)};
}

std::pair<PpnResult, PpnResult> decode_pair(const RgbImage& left, const RgbImage& right, double mod_threshold) {
    return {decode(left, mod_threshold), decode(right, mod_threshold)};
}

std::string ChannelOrder::name() const {
    static constexpr char kLetters[] = {'r', 'g', 'b'};
    return {kLetters[source[0]], kLetters[source[1]], kLetters[source[2]]};
}

ChannelOrder ChannelOrder::parse(std::string_view name) {
    if (name.size() != 3) throw Error("ppn", "channel order must have 3 letters: '" + std::string(name) + "'");
    ChannelOrder order;
    bool seen[3] = {false, false, false};
    for (int i = 0; i < 3; ++i) {
        const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(name[i])));
        const int idx = c == 'r' ? 0 : c == 'g' ? 1 : c == 'b' ? 2 : -1;
        if (idx < 0 || seen[idx]) throw Error("ppn", "invalid channel order '" + std::string(name) + "'");
        seen[idx] = true;
        order.source[i] = idx;
    }
    return order;
}

std::array<ChannelOrder, 6> ChannelOrder::all() {
    return {ChannelOrder{{0, 1, 2}}, ChannelOrder{{0, 2, 1}}, ChannelOrder{{1, 0, 2}},
            ChannelOrder{{1, 2, 0}}, ChannelOrder{{2, 0, 1}}, ChannelOrder{{2, 1, 0}}};
}

RgbImage permute_channels(const RgbImage& img, const ChannelOrder& order) {
    return RgbImage(img.plane(order.source[0]), img.plane(order.source[1]), img.plane(order.source[2]));
}

PpnResult channel_permute_decode(const RgbImage& img, const ChannelOrder& order, double mod_threshold) {
    return decode(permute_channels(img, order), mod_threshold);
}

} // namespace rgbspeckle::ppn
