#pragma once

#include "rgbspeckle/image.hpp"
#include "rgbspeckle/phase.hpp"

#include <cstdint>
#include <vector>

namespace rgbspeckle::pattern {

/// Parameters of the RGB phase-speckle projector pattern.
struct PatternParams {
    double a = 0.5;         ///< background intensity
    double b = 0.45;        ///< fringe amplitude
    int period = 8;         ///< fringe period in low-res pixels
    int lo_width = 320;
    int lo_height = 180;
    int upsample = 4;       ///< block replication factor
    std::uint64_t seed = 1;

    int width() const { return lo_width * upsample; }
    int height() const { return lo_height * upsample; }

    /// Throws Error("pattern", ...) on the first violated constraint.
    void validate() const;

    friend bool operator==(const PatternParams&, const PatternParams&) = default;
};

/// SplitMix64. Increment 0x9E3779B97F4A7C15, output mix
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z ^ (z >> 31)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform integer in [0, bound) by rejection sampling; bound > 0.
    std::uint64_t bounded(std::uint64_t bound);

private:
    std::uint64_t state_;
};

/// Bijection on {0..n-1}.
class Permutation {
public:
    static Permutation identity(std::size_t n);
    /// Throws if `map` is not a bijection.
    explicit Permutation(std::vector<std::uint32_t> map);

    std::size_t size() const { return map_.size(); }
    std::uint32_t operator[](std::size_t i) const { return map_[i]; }
    const std::vector<std::uint32_t>& map() const { return map_; }
    Permutation inverse() const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    Permutation() = default;
    std::vector<std::uint32_t> map_;
};

/// Vertical fringe: phase(x, y) = wrap(2 pi x / period).
PhaseField gen_base_phase(int lo_width, int lo_height, int period);

/// Fisher-Yates shuffle (i = n-1 down to 1, j = bounded(i+1)) of the identity
/// driven by SplitMix64(seed).
Permutation gen_permutation(std::size_t n, std::uint64_t seed);

/// out[i] = in[perm[i]] over the row-major flattening.
PhaseField scramble(const PhaseField& phase, const Permutation& perm);
GrayImage scramble(const GrayImage& plane, const Permutation& perm);
RgbImage scramble(const RgbImage& img, const Permutation& perm);

/// Nearest-neighbour block replication: out(x, y) = in(x / k, y / k).
PhaseField upsample_block(const PhaseField& phase, int k);
GrayImage upsample_block(const GrayImage& plane, int k);

/// B = a + b cos(phi - 2pi/3), G = a + b cos(phi), R = a + b cos(phi + 2pi/3).
RgbImage compose_rgb(const PhaseField& phase, double a, double b);

/// base phase -> scramble -> block upsample -> RGB composition.
RgbImage gen_speckle_pattern(const PatternParams& params);

/// The phase field the pattern encodes, at projector resolution.
PhaseField speckle_phase(const PatternParams& params);

} // namespace rgbspeckle::pattern
