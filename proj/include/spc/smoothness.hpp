#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spc {

/// First-difference operator on a latent component vector, applied matrix-free.
///
/// Chain is the (I-1) x I bidiagonal difference matrix with rows
/// (..., 1, -1, ...). StackedGrid treats the vector as an H x W grid stored
/// with the row index fastest and stacks vertical differences (within
/// columns) on top of horizontal differences (within rows); within each block
/// the rows follow the grid's canonical order. Disabled is the empty operator
/// used for modes whose smoothing strength is zero.
class SmoothnessOperator {
public:
    enum class Kind : std::uint8_t { Disabled, Chain, StackedGrid };

    SmoothnessOperator() = default;

    static SmoothnessOperator disabled(std::size_t input_size);
    static SmoothnessOperator chain(std::size_t length);
    static SmoothnessOperator stacked_grid(std::size_t height, std::size_t width);

    Kind kind() const { return kind_; }
    std::size_t input_size() const { return input_; }
    std::size_t rows() const;
    std::size_t grid_height() const { return height_; }
    std::size_t grid_width() const { return width_; }

    /// out = L u; out must have rows() entries.
    void apply(std::span<const double> u, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> u) const;

    /// out = L^T w; out must have input_size() entries.
    void apply_transpose(std::span<const double> w, std::span<double> out) const;
    std::vector<double> apply_transpose(std::span<const double> w) const;

    /// ||L u||_p^p for p in {1, 2}.
    double penalty(std::span<const double> u, int p) const;

    /// p = 1: L^T SGN(L u), a subgradient of ||L u||_1.
    /// p = 2: 2 L^T L u, the gradient of ||L u||_2^2.
    void penalty_subgradient(std::span<const double> u, int p, std::span<double> out) const;
    std::vector<double> penalty_subgradient(std::span<const double> u, int p) const;

private:
    Kind kind_ = Kind::Disabled;
    std::size_t input_ = 0;
    std::size_t height_ = 0;
    std::size_t width_ = 0;
};

/// Entrywise sign with sgn(0) = 0.
double sgn(double x);
std::vector<double> sgn_vec(std::span<const double> x);

}  // namespace spc
