#pragma once

#include <cstdint>
#include <vector>

#include "spc/tensor.hpp"

namespace spc {

/// One Gaussian bump of a synthetic smooth tensor: center and per-axis width
/// in 0-based grid coordinates, plus a mixture weight.
struct GaussianComponent {
    std::vector<double> center;
    std::vector<double> width;
    double weight = 1.0;
};

/// entry(i_0..i_{N-1}) = scale * sum_k w_k exp(-sum_n (i_n - c_kn)^2 / (2 s_kn^2)).
DenseTensor gaussian_mixture_tensor(const std::vector<std::size_t>& dims,
                                    const std::vector<GaussianComponent>& components,
                                    double value_scale);

/// Seeded four-bump mixture used as the default synthetic volume: centers in
/// the middle 70% of each axis, widths between 8% and 20% of the extent,
/// weights in [0.5, 1], scale 100.
std::vector<GaussianComponent> default_phantom_components(const std::vector<std::size_t>& dims,
                                                          std::uint64_t seed);
DenseTensor default_phantom(const std::vector<std::size_t>& dims, std::uint64_t seed);

/// Uniform mask with exactly round(missing_ratio * size) unobserved entries,
/// chosen without replacement. missing_ratio must be in [0, 1).
Mask random_mask(const std::vector<std::size_t>& dims, double missing_ratio, std::uint64_t seed);

/// Pixel-level mask for an height x width x channels image: selected pixels
/// lose every channel at once.
Mask dead_pixel_mask(std::size_t height, std::size_t width, std::size_t channels,
                     double missing_ratio, std::uint64_t seed);

}  // namespace spc
