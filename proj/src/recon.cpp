#include "rgbspeckle/recon.hpp"

#include "rgbspeckle/error.hpp"

#include <cstdio>

namespace rgbspeckle::recon {

double depth_from_disparity(double disparity, double focal, double baseline) { return focal * baseline / disparity; }

PointCloud triangulate(const DisparityMap& disp, const sim::RigSpec& rig, const RgbImage& color, double min_disp) {
    if (disp.width() != color.width() || disp.height() != color.height())
        throw Error("recon", "disparity and colour image differ in size");
    if (!(min_disp > 0.0)) throw Error("recon", "minimum disparity must be positive");
    rig.validate();
    const double cx = (disp.width() - 1) / 2.0;
    const double cy = (disp.height() - 1) / 2.0;
    PointCloud cloud;
    for (int y = 0; y < disp.height(); ++y) {
        for (int x = 0; x < disp.width(); ++x) {
            const float d = disp(x, y);
            if (is_invalid(d) || d < min_disp) continue;
            const double z = depth_from_disparity(d, rig.focal, rig.baseline);
            cloud.points.push_back({(x - cx) * z / rig.focal, (y - cy) * z / rig.focal, z,
                                    io::quantize8(color.r()(x, y)), io::quantize8(color.g()(x, y)),
                                    io::quantize8(color.b()(x, y))});
        }
    }
    return cloud;
}

std::vector<std::string> ply_comments(const sim::RigSpec& rig, int width, int height) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "focal %.6g px baseline %.6g mm principal point (%.1f, %.1f) image centre",
                  rig.focal, rig.baseline, (width - 1) / 2.0, (height - 1) / 2.0);
    return {buf, "units mm, left camera frame"};
}

} // namespace rgbspeckle::recon
