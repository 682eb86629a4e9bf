#pragma once

#include "rgbspeckle/image.hpp"

#include <array>

namespace rgbspeckle::colormap {

/// Fixed 5-stop jet-style table, linearly interpolated:
///   0.00 (0,0,0.5)  0.25 (0,0.5,1)  0.50 (0.5,1,0.5)  0.75 (1,0.5,0)  1.00 (0.5,0,0)
/// Input is clamped to [0,1]. NaN maps to black.
std::array<float, 3> jet(float t);

/// Maps a scalar field onto the jet table over [lo, hi]; NaN pixels are black.
RgbImage apply_jet(const GrayImage& values, float lo, float hi);
RgbImage apply_jet(const DisparityMap& values, float lo, float hi);

/// Wrapped phase to hue (s = v = 1), hue = (phi + pi) / 2pi. Pixels outside
/// `valid` are black.
RgbImage phase_to_hue(const GrayImage& phase, const ValidityMask& valid);

} // namespace rgbspeckle::colormap
