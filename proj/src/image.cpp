#include "rgbspeckle/image.hpp"

#include "rgbspeckle/error.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace rgbspeckle {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1)
        throw Error("imgcore", "image dimensions must be positive, got " + std::to_string(width) + "x" +
                                   std::to_string(height));
}

} // namespace

GrayImage::GrayImage(int width, int height, float fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw Error("imgcore", "sample count " + std::to_string(data_.size()) + " does not match " +
                                   std::to_string(width) + "x" + std::to_string(height));
}

RgbImage::RgbImage(int width, int height, float fill)
    : r_(width, height, fill), g_(width, height, fill), b_(width, height, fill) {}

RgbImage::RgbImage(GrayImage r, GrayImage g, GrayImage b)
    : r_(std::move(r)), g_(std::move(g)), b_(std::move(b)) {
    if (!r_.same_shape(g_) || !r_.same_shape(b_))
        throw Error("imgcore", "RGB planes have mismatched dimensions");
    if (r_.empty()) throw Error("imgcore", "RGB planes are empty");
}

ValidityMask::ValidityMask(int width, int height, bool fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t ValidityMask::count() const {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), 1));
}

ValidityMask operator&(const ValidityMask& a, const ValidityMask& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw Error("imgcore", "mask dimensions differ");
    ValidityMask out(a.width(), a.height(), false);
    for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] && b[i]);
    return out;
}

DisparityMap::DisparityMap(int width, int height, float fill) : values_(width, height, fill) {}

DisparityMap::DisparityMap(int width, int height, std::vector<float> data)
    : values_(width, height, std::move(data)) {}

ValidityMask DisparityMap::validity() const {
    ValidityMask m(width(), height(), false);
    for (std::size_t i = 0; i < size(); ++i) m.set(i, !is_invalid(values_[i]));
    return m;
}

bool DisparityMap::bit_equal(const DisparityMap& other) const {
    if (width() != other.width() || height() != other.height()) return false;
    return std::memcmp(values_.data().data(), other.values_.data().data(), size() * sizeof(float)) == 0;
}

} // namespace rgbspeckle
