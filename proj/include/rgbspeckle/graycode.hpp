#pragma once

#include "rgbspeckle/image.hpp"
#include "rgbspeckle/simulator.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace rgbspeckle::graycode {

inline constexpr double kDefaultContrastThreshold = 0.05;

/// Reflected binary code, v ^ (v >> 1).
std::uint64_t gray_encode(std::uint64_t v);
/// Inverse of gray_encode (prefix XOR).
std::uint64_t gray_decode(std::uint64_t g);

/// Column-code frame stack. Layout: frames[2i] carries bit i of
/// gray_encode(column) (bright = 1), frames[2i + 1] its complement,
/// frames[2n] all-white, frames[2n + 1] all-black.
struct GraycodeStack {
    int n_bits = 0;
    int proj_width = 0;  ///< number of encoded projector columns
    std::vector<GrayImage> frames;

    const GrayImage& code(int bit) const { return frames[2 * bit]; }
    const GrayImage& inverse(int bit) const { return frames[2 * bit + 1]; }
    const GrayImage& white() const { return frames[2 * n_bits]; }
    const GrayImage& black() const { return frames[2 * n_bits + 1]; }
    int width() const { return frames.empty() ? 0 : frames.front().width(); }
    int height() const { return frames.empty() ? 0 : frames.front().height(); }

    /// Throws unless frame count is 2n+2 and all frames share dimensions.
    void validate() const;
};

/// Smallest n with 2^n >= proj_width.
int bits_for_width(int proj_width);

GraycodeStack gen_stack(int proj_width, int proj_height, int n_bits);

/// Projector x-coordinate per camera pixel; NaN where invalid.
struct CoordMap {
    GrayImage coord;
    ValidityMask valid;

    int width() const { return coord.width(); }
    int height() const { return coord.height(); }
};

enum class Subpixel {
    /// Linear interpolation across each run of equal integer column.
    Run,
    /// Fractional offset read from the normalized intensity of the one code
    /// bit that flips between the decoded column and its neighbour.
    Edge,
};

/// Binarizes each bit as code > inverse, gray-decodes the column, and refines
/// it to subpixel. Pixels with white - black < contrast_threshold, or whose
/// column falls outside [0, proj_width), are invalid.
CoordMap decode_stack(const GraycodeStack& captured, double contrast_threshold = kDefaultContrastThreshold,
                      Subpixel mode = Subpixel::Edge);

/// Disparity from equal projector coordinates along each rectified row. For a
/// valid left coordinate c the right row is searched for the unique rising
/// bracket r[j] <= c < r[j+1] (or an exact hit); disparity = x_l - x_r.
/// No bracket, several brackets, or a negative result leave the pixel NaN.
DisparityMap gt_from_stereo(const CoordMap& left, const CoordMap& right);

/// Renders every frame of `stack` through the simulator and converts the
/// captures to gray (channel mean). Frame k uses noise seed
/// scene.noise_seed + k.
std::pair<GraycodeStack, GraycodeStack> capture_stack(const GraycodeStack& stack, const sim::SceneSpec& scene,
                                                      const sim::RigSpec& rig);

} // namespace rgbspeckle::graycode
