#pragma once

#include "rgbspeckle/image.hpp"
#include "rgbspeckle/ppn.hpp"

#include <limits>
#include <string>
#include <vector>

namespace rgbspeckle::matcher {

enum class Mode { Rgb, Phase };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct MatchParams {
    int d_min = 0;
    int d_max = 64;
    int radius = 5;  ///< window is (2 radius + 1)^2
    Mode mode = Mode::Phase;
    double lr_threshold = 1.0;  ///< infinity disables the left-right check
    bool subpixel = true;

    /// Throws unless 0 <= d_min < d_max < width and radius in [1, 15].
    void validate(int width) const;
};

/// Multi-plane matching features of one view.
struct FeatureImage {
    std::vector<GrayImage> planes;

    int width() const { return planes.empty() ? 0 : planes.front().width(); }
    int height() const { return planes.empty() ? 0 : planes.front().height(); }
};

FeatureImage rgb_features(const RgbImage& img);

/// (cos phi, sin phi) per pixel, (0, 0) where the PPN mask is false. SSD on
/// this embedding is 2 - 2 cos(delta phi) between two valid pixels.
FeatureImage embed_phase(const ppn::PpnResult& p);

/// SSD over the window between the left patch and the right patch shifted by
/// d in [d_min, d_max], winner-take-all (ties keep the smaller d), optional
/// parabola refinement over (d-1, d, d+1) clamped to +-0.5. Pixels whose
/// window does not fit, or with no admissible d, are NaN.
DisparityMap match(const FeatureImage& left, const FeatureImage& right, const MatchParams& params);

/// Disparity of the right view (right x_r matches left x_r + d).
DisparityMap match_right_view(const FeatureImage& left, const FeatureImage& right, const MatchParams& params);

/// Invalidates left pixels with |d_left(x) - d_right(x - round(d_left(x)))| >
/// threshold, or whose target is out of bounds or invalid. An infinite
/// threshold returns d_left unchanged.
DisparityMap lr_check(const DisparityMap& d_left, const DisparityMap& d_right, double lr_threshold);

/// Features for the chosen mode (PPN decode for Phase), left match, and the
/// left-right check when lr_threshold is finite.
DisparityMap match_views(const RgbImage& left, const RgbImage& right, const MatchParams& params,
                         double mod_threshold = ppn::kDefaultModThreshold);

} // namespace rgbspeckle::matcher
