#pragma once

#include "spc/tensor.hpp"

namespace spc {

/// Entry subset a metric is evaluated on. All ignores the mask (which may be
/// null); Observed/Missing require a mask with at least one entry in the
/// chosen region.
enum class Region { All, Observed, Missing };

/// Mean squared difference over the selected region.
double mse(const DenseTensor& a, const DenseTensor& b, const Mask* mask = nullptr,
           Region region = Region::All);

/// 10 log10(255^2 / MSE) in dB, for images on the 0-255 convention.
/// Identical inputs give +infinity.
double psnr(const DenseTensor& a, const DenseTensor& b, const Mask* mask = nullptr,
            Region region = Region::All);

/// Structural similarity with an 8x8 uniform sliding window (stride 1),
/// K1 = 0.01, K2 = 0.03, L = 255, averaged over windows. Accepts 2-D gray
/// images or H x W x C tensors (per-channel mean).
double ssim(const DenseTensor& a, const DenseTensor& b);

/// 10 log10(signal energy / error energy) in dB over the selected region.
/// A zero-error estimate gives +infinity.
double sdr(const DenseTensor& truth, const DenseTensor& estimate, const Mask* mask = nullptr,
           Region region = Region::All);

}  // namespace spc
