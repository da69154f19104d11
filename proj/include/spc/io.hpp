#pragma once

#include <string>
#include <vector>

#include "spc/tensor.hpp"

namespace spc {

/// SPCT container: magic "SPCT", u32-LE version (= 1), u8 payload kind
/// (0 = float64 tensor, 1 = u8 mask), u32-LE ndim, ndim u64-LE extents,
/// then the payload in canonical index order (first index fastest).
/// Tensor payloads are little-endian IEEE-754 doubles; mask payloads are one
/// byte per entry (1 = observed, 0 = missing). Round trips are bit-exact.

void write_tensor(const std::string& path, const DenseTensor& t);
DenseTensor read_tensor(const std::string& path);

void write_mask(const std::string& path, const Mask& m);
Mask read_mask(const std::string& path);

/// Reads an 8-bit PNG as an H x W x 3 tensor of values in 0-255. Grayscale
/// is promoted to three channels; an alpha channel is dropped; palette and
/// 16-bit images are rejected.
DenseTensor png_to_tensor(const std::string& path);

/// Writes an H x W x 3 tensor as RGB (or an H x W tensor as grayscale);
/// values are clamped to [0, 255] and rounded half away from zero.
void tensor_to_png(const DenseTensor& t, const std::string& path);

enum class MaskRule { ZeroIsMissing, NonzeroIsMissing };

/// Builds a pixel-level mask from an image: a pixel counts as zero when all
/// its channels are zero, and the missing decision is replicated across the
/// target's channels. The image must match the target's height and width.
Mask mask_from_image(const std::string& path, MaskRule rule,
                     const std::vector<std::size_t>& target_dims);

}  // namespace spc
