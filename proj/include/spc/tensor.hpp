#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace spc {

/// Dense N-way tensor of doubles.
///
/// Entries are stored with the first index varying fastest: the flat offset
/// of (i_0, ..., i_{N-1}) is i_0 + I_0*(i_1 + I_1*(i_2 + ...)). Modes are
/// 0-based throughout the API.
class DenseTensor {
public:
    DenseTensor() = default;

    /// Zero tensor with the given extents.
    explicit DenseTensor(std::vector<std::size_t> dims);

    /// Takes ownership of `data`, which must have exactly prod(dims) finite
    /// entries.
    DenseTensor(std::vector<std::size_t> dims, std::vector<double> data);

    std::size_t order() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t mode) const { return dims_[mode]; }
    std::size_t size() const { return data_.size(); }

    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    std::size_t offset(std::span<const std::size_t> idx) const;

    double at(std::initializer_list<std::size_t> idx) const;
    double& at(std::initializer_list<std::size_t> idx);

    bool all_finite() const;

private:
    std::vector<std::size_t> dims_;
    std::vector<double> data_;
};

/// Boolean observation pattern over a tensor of matching extents.
/// An entry is "observed" when its flag is nonzero.
class Mask {
public:
    Mask() = default;

    /// Mask with every entry set to `observed`.
    explicit Mask(std::vector<std::size_t> dims, bool observed = true);

    /// Takes ownership of per-entry flags (1 = observed, 0 = missing).
    Mask(std::vector<std::size_t> dims, std::vector<std::uint8_t> flags);

    std::size_t order() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t size() const { return flags_.size(); }

    bool observed(std::size_t flat_index) const { return flags_[flat_index] != 0; }
    void set(std::size_t flat_index, bool observed) { flags_[flat_index] = observed ? 1 : 0; }

    std::span<const std::uint8_t> flags() const { return flags_; }

    std::size_t observed_count() const;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::uint8_t> flags_;
};

/// Minimal column-major matrix, used for unfoldings and factor storage.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // data[r + rows*c]

    Matrix() = default;
    Matrix(std::size_t rows_, std::size_t cols_)
        : rows(rows_), cols(cols_), data(rows_ * cols_, 0.0) {}

    double at(std::size_t r, std::size_t c) const { return data[r + rows * c]; }
    double& at(std::size_t r, std::size_t c) { return data[r + rows * c]; }
};

/// Sum of squared entries.
double frobenius_norm_sq(const DenseTensor& t);

/// Mode-k unfolding: rows are mode-k fibers, columns enumerate the remaining
/// indices with the smallest remaining mode varying fastest.
Matrix unfold(const DenseTensor& t, std::size_t mode);

/// Inverse of unfold for the given extents.
DenseTensor fold(const Matrix& m, std::size_t mode, const std::vector<std::size_t>& dims);

/// Contract mode `mode` with vector `v`; the contracted mode is removed from
/// the result (order drops by one).
DenseTensor mode_vector_product(const DenseTensor& t, std::size_t mode, std::span<const double> v);

/// Contract every mode except `mode`. `vectors` has one entry per mode; the
/// entry at position `mode` is ignored.
std::vector<double> contract_all_but(const DenseTensor& t, std::size_t mode,
                                     const std::vector<std::span<const double>>& vectors);

/// t += coeff * (v_0 outer v_1 outer ... outer v_{N-1}).
void rank1_accumulate(DenseTensor& t, double coeff,
                      const std::vector<std::span<const double>>& vectors);

/// Full contraction <t, v_0 outer ... outer v_{N-1}>.
double inner_with_rank1(const DenseTensor& t,
                        const std::vector<std::span<const double>>& vectors);

enum class MaskRegion { Observed, Unobserved };

/// Copy `src` into `dst` on the selected region; the other region is untouched.
void masked_overwrite(DenseTensor& dst, const DenseTensor& src, const Mask& mask,
                      MaskRegion region);

/// Set every entry of the selected region to `value`.
void masked_fill(DenseTensor& dst, double value, const Mask& mask, MaskRegion region);

}  // namespace spc
