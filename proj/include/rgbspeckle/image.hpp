#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace rgbspeckle {

/// Row-major single-channel float image. Nominal range is [0,1] but
/// intermediate math is allowed to leave it.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, float fill = 0.0f);
    GrayImage(int width, int height, std::vector<float> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float& operator()(int x, int y) { return data_[index(x, y)]; }
    float operator()(int x, int y) const { return data_[index(x, y)]; }
    float& operator[](std::size_t i) { return data_[i]; }
    float operator[](std::size_t i) const { return data_[i]; }

    std::span<float> row(int y) { return {data_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
    std::span<const float> row(int y) const {
        return {data_.data() + index(0, y), static_cast<std::size_t>(width_)};
    }
    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }

    bool same_shape(int w, int h) const { return w == width_ && h == height_; }
    template <class Other>
    bool same_shape(const Other& o) const { return same_shape(o.width(), o.height()); }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Planar RGB image; all three planes share dimensions.
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height, float fill = 0.0f);
    RgbImage(GrayImage r, GrayImage g, GrayImage b);

    int width() const { return r_.width(); }
    int height() const { return r_.height(); }

    GrayImage& plane(int c) { return c == 0 ? r_ : (c == 1 ? g_ : b_); }
    const GrayImage& plane(int c) const { return c == 0 ? r_ : (c == 1 ? g_ : b_); }
    GrayImage& r() { return r_; }
    GrayImage& g() { return g_; }
    GrayImage& b() { return b_; }
    const GrayImage& r() const { return r_; }
    const GrayImage& g() const { return g_; }
    const GrayImage& b() const { return b_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    GrayImage r_, g_, b_;
};

/// Per-pixel boolean mask.
class ValidityMask {
public:
    ValidityMask() = default;
    ValidityMask(int width, int height, bool fill = true);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    bool operator()(int x, int y) const { return data_[index(x, y)] != 0; }
    void set(int x, int y, bool v) { data_[index(x, y)] = v ? 1 : 0; }
    bool operator[](std::size_t i) const { return data_[i] != 0; }
    void set(std::size_t i, bool v) { data_[i] = v ? 1 : 0; }

    std::size_t count() const;

    friend bool operator==(const ValidityMask&, const ValidityMask&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<unsigned char> data_;
};

/// Elementwise AND of two equally sized masks.
ValidityMask operator&(const ValidityMask& a, const ValidityMask& b);

inline constexpr float kInvalidDisparity = std::numeric_limits<float>::quiet_NaN();

inline bool is_invalid(float disparity) { return std::isnan(disparity); }

/// Subpixel disparity map; NaN marks invalid pixels, finite values are >= 0.
class DisparityMap {
public:
    DisparityMap() = default;
    DisparityMap(int width, int height, float fill = kInvalidDisparity);
    DisparityMap(int width, int height, std::vector<float> data);

    int width() const { return values_.width(); }
    int height() const { return values_.height(); }
    std::size_t size() const { return values_.size(); }

    float& operator()(int x, int y) { return values_(x, y); }
    float operator()(int x, int y) const { return values_(x, y); }
    float& operator[](std::size_t i) { return values_[i]; }
    float operator[](std::size_t i) const { return values_[i]; }
    std::span<float> data() { return values_.data(); }
    std::span<const float> data() const { return values_.data(); }

    bool valid(int x, int y) const { return !is_invalid(values_(x, y)); }
    ValidityMask validity() const;

    /// Bitwise equality, treating NaN payloads as values.
    bool bit_equal(const DisparityMap& other) const;

private:
    GrayImage values_;
};

} // namespace rgbspeckle
