#pragma once

#include "rgbspeckle/image.hpp"
#include "rgbspeckle/phase.hpp"

#include <array>
#include <string>
#include <string_view>
#include <utility>

namespace rgbspeckle::ppn {

inline constexpr double kDefaultModThreshold = 0.05;

/// Phase pre-normalization of one view.
///   num = 2G - R - B, den = R - B
///   phase = atan2(num, den), modulation = hypot(num, den)
/// valid[p] is modulation[p] > threshold. Pixels with num = den = 0 carry
/// phase 0 and are invalid.
struct PpnResult {
    PhaseField phase;
    GrayImage modulation;
    ValidityMask valid;
};

PpnResult decode(const RgbImage& img, double mod_threshold = kDefaultModThreshold);

/// Independent decode of both views.
std::pair<PpnResult, PpnResult> decode_pair(const RgbImage& left, const RgbImage& right,
                                            double mod_threshold = kDefaultModThreshold);

/// Source channel index (0 = R, 1 = G, 2 = B) for each output slot R, G, B.
struct ChannelOrder {
    std::array<int, 3> source{0, 1, 2};

    std::string name() const;
    /// Parses "rgb", "gbr", ... (case-insensitive).
    static ChannelOrder parse(std::string_view name);
    /// The six orders, identity first.
    static std::array<ChannelOrder, 6> all();

    friend bool operator==(const ChannelOrder&, const ChannelOrder&) = default;
};

RgbImage permute_channels(const RgbImage& img, const ChannelOrder& order);

PpnResult channel_permute_decode(const RgbImage& img, const ChannelOrder& order,
                                 double mod_threshold = kDefaultModThreshold);

} // namespace rgbspeckle::ppn
