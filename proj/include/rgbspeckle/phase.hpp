#pragma once

#include "rgbspeckle/image.hpp"

#include <numbers>

namespace rgbspeckle {

inline constexpr double kPi = std::numbers::pi;
inline constexpr float kPiF = static_cast<float>(std::numbers::pi);

/// Folds an angle into (-pi, pi] and rounds to float, keeping the float
/// result inside (-kPiF, kPiF].
float wrap_phase(double radians);

inline bool in_wrapped_range(float v) { return v > -kPiF && v <= kPiF; }

/// Wrapped phase in radians, every sample in (-pi, pi].
class PhaseField {
public:
    PhaseField() = default;
    PhaseField(int width, int height) : values_(width, height, 0.0f) {}
    /// Throws if any sample is outside (-pi, pi] or non-finite.
    explicit PhaseField(GrayImage values);

    int width() const { return values_.width(); }
    int height() const { return values_.height(); }
    std::size_t size() const { return values_.size(); }

    float operator()(int x, int y) const { return values_(x, y); }
    float operator[](std::size_t i) const { return values_[i]; }
    /// Stores wrap_phase(radians).
    void set(std::size_t i, double radians) { values_[i] = wrap_phase(radians); }
    void set(int x, int y, double radians) { values_(x, y) = wrap_phase(radians); }

    const GrayImage& values() const { return values_; }

    friend bool operator==(const PhaseField&, const PhaseField&) = default;

private:
    GrayImage values_;
};

} // namespace rgbspeckle
