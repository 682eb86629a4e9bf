#pragma once

#include "rgbspeckle/image.hpp"
#include "rgbspeckle/io.hpp"
#include "rgbspeckle/simulator.hpp"

#include <string>
#include <vector>

namespace rgbspeckle::recon {

inline constexpr double kDefaultMinDisparity = 1.0;

/// Points in millimetres in the left camera frame, row-major pixel order.
struct PointCloud {
    std::vector<io::ColoredPoint> points;
};

/// Z = focal * baseline / d.
double depth_from_disparity(double disparity, double focal, double baseline);

/// Rectified pinhole back-projection with the principal point at the image
/// centre ((width - 1) / 2, (height - 1) / 2):
///   Z = f b / d,  X = (x - cx) Z / f,  Y = (y - cy) Z / f.
/// Invalid pixels and d < min_disp are skipped. Colours are 8-bit quantized.
PointCloud triangulate(const DisparityMap& disp, const sim::RigSpec& rig, const RgbImage& color,
                       double min_disp = kDefaultMinDisparity);

/// Header comments written alongside a cloud.
std::vector<std::string> ply_comments(const sim::RigSpec& rig, int width, int height);

} // namespace rgbspeckle::recon
