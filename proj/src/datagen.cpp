#include "spc/datagen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace spc {

namespace {

// Marks `missing` distinct flat positions as unobserved via partial Fisher-Yates.
std::vector<std::uint8_t> draw_missing(std::size_t size, std::size_t missing,
                                       std::mt19937_64& rng) {
    std::vector<std::size_t> pool(size);
    for (std::size_t i = 0; i < size; ++i) pool[i] = i;
    std::vector<std::uint8_t> flags(size, 1);
    for (std::size_t k = 0; k < missing; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, size - 1);
        std::swap(pool[k], pool[pick(rng)]);
        flags[pool[k]] = 0;
    }
    return flags;
}

std::size_t missing_count(std::size_t size, double missing_ratio) {
    if (!(missing_ratio >= 0.0) || missing_ratio >= 1.0)
        throw std::invalid_argument("missing ratio must be in [0, 1)");
    return static_cast<std::size_t>(std::llround(missing_ratio * static_cast<double>(size)));
}

}  // namespace

DenseTensor gaussian_mixture_tensor(const std::vector<std::size_t>& dims,
                                    const std::vector<GaussianComponent>& components,
                                    double value_scale) {
    DenseTensor t(dims);  // validates extents
    const std::size_t order = dims.size();
    for (const GaussianComponent& c : components) {
        if (c.center.size() != order || c.width.size() != order)
            throw std::invalid_argument("component center/width must have one entry per mode");
        for (std::size_t n = 0; n < order; ++n) {
            if (!(c.width[n] > 0.0)) throw std::invalid_argument("component widths must be positive");
            if (c.center[n] < 0.0 || c.center[n] > static_cast<double>(dims[n] - 1))
                throw std::invalid_argument("component center outside the grid");
        }
    }

    double* out = t.values().data();
    std::vector<std::size_t> idx(order, 0);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        double value = 0.0;
        for (const GaussianComponent& c : components) {
            double exponent = 0.0;
            for (std::size_t n = 0; n < order; ++n) {
                const double d = static_cast<double>(idx[n]) - c.center[n];
                exponent += d * d / (2.0 * c.width[n] * c.width[n]);
            }
            value += c.weight * std::exp(-exponent);
        }
        out[flat] = value_scale * value;

        for (std::size_t n = 0; n < order; ++n) {
            if (++idx[n] < dims[n]) break;
            idx[n] = 0;
        }
    }
    return t;
}

std::vector<GaussianComponent> default_phantom_components(const std::vector<std::size_t>& dims,
                                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<GaussianComponent> components(4);
    for (GaussianComponent& c : components) {
        c.center.resize(dims.size());
        c.width.resize(dims.size());
        for (std::size_t n = 0; n < dims.size(); ++n) {
            const double extent = static_cast<double>(dims[n]);
            c.center[n] = (0.15 + 0.70 * unit(rng)) * (extent - 1.0);
            c.width[n] = (0.08 + 0.12 * unit(rng)) * extent;
        }
        c.weight = 0.5 + 0.5 * unit(rng);
    }
    return components;
}

DenseTensor default_phantom(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    return gaussian_mixture_tensor(dims, default_phantom_components(dims, seed), 100.0);
}

Mask random_mask(const std::vector<std::size_t>& dims, double missing_ratio, std::uint64_t seed) {
    Mask probe(dims);  // validates extents
    std::mt19937_64 rng(seed);
    return Mask(dims, draw_missing(probe.size(), missing_count(probe.size(), missing_ratio), rng));
}

Mask dead_pixel_mask(std::size_t height, std::size_t width, std::size_t channels,
                     double missing_ratio, std::uint64_t seed) {
    const std::size_t pixels = height * width;
    if (pixels == 0 || channels == 0) throw std::invalid_argument("image extents must be positive");
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> pixel_flags =
        draw_missing(pixels, missing_count(pixels, missing_ratio), rng);

    std::vector<std::uint8_t> flags(pixels * channels);
    for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t p = 0; p < pixels; ++p) flags[p + pixels * c] = pixel_flags[p];
    return Mask({height, width, channels}, std::move(flags));
}

}  // namespace spc
