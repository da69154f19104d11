#include "spc/smoothness.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace spc {

namespace {

void check_p(int p) {
    if (p != 1 && p != 2) throw std::invalid_argument("penalty order p must be 1 or 2");
}

}  // namespace

SmoothnessOperator SmoothnessOperator::disabled(std::size_t input_size) {
    SmoothnessOperator op;
    op.kind_ = Kind::Disabled;
    op.input_ = input_size;
    return op;
}

SmoothnessOperator SmoothnessOperator::chain(std::size_t length) {
    if (length < 2) throw std::invalid_argument("chain operator needs length >= 2");
    SmoothnessOperator op;
    op.kind_ = Kind::Chain;
    op.input_ = length;
    return op;
}

SmoothnessOperator SmoothnessOperator::stacked_grid(std::size_t height, std::size_t width) {
    if (height < 1 || width < 1) throw std::invalid_argument("grid extents must be positive");
    SmoothnessOperator op;
    op.kind_ = Kind::StackedGrid;
    op.input_ = height * width;
    op.height_ = height;
    op.width_ = width;
    return op;
}

std::size_t SmoothnessOperator::rows() const {
    switch (kind_) {
        case Kind::Disabled: return 0;
        case Kind::Chain: return input_ - 1;
        case Kind::StackedGrid: return height_ * (width_ - 1) + (height_ - 1) * width_;
    }
    return 0;
}

void SmoothnessOperator::apply(std::span<const double> u, std::span<double> out) const {
    if (u.size() != input_) throw std::invalid_argument("operator input length mismatch");
    if (out.size() != rows()) throw std::invalid_argument("operator output length mismatch");

    switch (kind_) {
        case Kind::Disabled: break;
        case Kind::Chain:
            for (std::size_t i = 0; i + 1 < input_; ++i) out[i] = u[i] - u[i + 1];
            break;
        case Kind::StackedGrid: {
            std::size_t k = 0;
            for (std::size_t w = 0; w < width_; ++w)
                for (std::size_t h = 0; h + 1 < height_; ++h)
                    out[k++] = u[h + height_ * w] - u[h + 1 + height_ * w];
            for (std::size_t w = 0; w + 1 < width_; ++w)
                for (std::size_t h = 0; h < height_; ++h)
                    out[k++] = u[h + height_ * w] - u[h + height_ * (w + 1)];
            break;
        }
    }
}

std::vector<double> SmoothnessOperator::apply(std::span<const double> u) const {
    std::vector<double> out(rows());
    apply(u, out);
    return out;
}

void SmoothnessOperator::apply_transpose(std::span<const double> w, std::span<double> out) const {
    if (w.size() != rows()) throw std::invalid_argument("operator row-space length mismatch");
    if (out.size() != input_) throw std::invalid_argument("operator output length mismatch");

    for (double& x : out) x = 0.0;
    switch (kind_) {
        case Kind::Disabled: break;
        case Kind::Chain:
            for (std::size_t i = 0; i + 1 < input_; ++i) {
                out[i] += w[i];
                out[i + 1] -= w[i];
            }
            break;
        case Kind::StackedGrid: {
            std::size_t k = 0;
            for (std::size_t w_ = 0; w_ < width_; ++w_)
                for (std::size_t h = 0; h + 1 < height_; ++h) {
                    out[h + height_ * w_] += w[k];
                    out[h + 1 + height_ * w_] -= w[k];
                    ++k;
                }
            for (std::size_t w_ = 0; w_ + 1 < width_; ++w_)
                for (std::size_t h = 0; h < height_; ++h) {
                    out[h + height_ * w_] += w[k];
                    out[h + height_ * (w_ + 1)] -= w[k];
                    ++k;
                }
            break;
        }
    }
}

std::vector<double> SmoothnessOperator::apply_transpose(std::span<const double> w) const {
    std::vector<double> out(input_);
    apply_transpose(w, out);
    return out;
}

double SmoothnessOperator::penalty(std::span<const double> u, int p) const {
    check_p(p);
    if (u.size() != input_) throw std::invalid_argument("operator input length mismatch");
    if (kind_ == Kind::Disabled) return 0.0;

    std::vector<double> diff = apply(u);
    double sum = 0.0;
    if (p == 1)
        for (double d : diff) sum += std::abs(d);
    else
        for (double d : diff) sum += d * d;
    return sum;
}

void SmoothnessOperator::penalty_subgradient(std::span<const double> u, int p,
                                             std::span<double> out) const {
    check_p(p);
    if (u.size() != input_) throw std::invalid_argument("operator input length mismatch");
    if (out.size() != input_) throw std::invalid_argument("operator output length mismatch");

    if (kind_ == Kind::Disabled) {
        for (double& x : out) x = 0.0;
        return;
    }

    std::vector<double> diff = apply(u);
    if (p == 1) {
        for (double& d : diff) d = sgn(d);
        apply_transpose(diff, out);
    } else {
        apply_transpose(diff, out);
        for (double& x : out) x *= 2.0;
    }
}

std::vector<double> SmoothnessOperator::penalty_subgradient(std::span<const double> u,
                                                            int p) const {
    std::vector<double> out(input_);
    penalty_subgradient(u, p, out);
    return out;
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::vector<double> sgn_vec(std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = sgn(x[i]);
    return out;
}

}  // namespace spc
