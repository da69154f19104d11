#include "spc/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spc {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& dims) {
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("tensor extent must be positive");
        n *= d;
    }
    return n;
}

void check_mode(const DenseTensor& t, std::size_t mode) {
    if (mode >= t.order())
        throw std::invalid_argument("mode " + std::to_string(mode) + " out of range for order " +
                                    std::to_string(t.order()) + " tensor");
}

void check_vectors(const DenseTensor& t, const std::vector<std::span<const double>>& vectors,
                   std::size_t skip_mode) {
    if (vectors.size() != t.order())
        throw std::invalid_argument("expected one vector per mode");
    for (std::size_t n = 0; n < t.order(); ++n) {
        if (n == skip_mode) continue;
        if (vectors[n].size() != t.dim(n))
            throw std::invalid_argument("vector length does not match mode " + std::to_string(n) +
                                        " extent");
    }
}

constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

// Contracts axis `axis` of a buffer with current extents `dims` against `v`,
// shrinking both in place.
void collapse_axis(std::vector<double>& buf, std::vector<std::size_t>& dims, std::size_t axis,
                   std::span<const double> v) {
    std::size_t stride = 1;
    for (std::size_t j = 0; j < axis; ++j) stride *= dims[j];
    const std::size_t extent = dims[axis];
    const std::size_t outer = buf.size() / (stride * extent);

    std::vector<double> next(stride * outer);
    for (std::size_t o = 0; o < outer; ++o) {
        const double* block = buf.data() + o * stride * extent;
        double* dst = next.data() + o * stride;
        for (std::size_t i = 0; i < stride; ++i) {
            double sum = 0.0;
            for (std::size_t k = 0; k < extent; ++k) sum += block[k * stride + i] * v[k];
            dst[i] = sum;
        }
    }
    buf = std::move(next);
    dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(axis));
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), data_(checked_size(dims_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
    if (data_.size() != checked_size(dims_))
        throw std::invalid_argument("data length does not match product of extents");
    if (!all_finite()) throw std::invalid_argument("tensor entries must be finite");
}

std::size_t DenseTensor::offset(std::span<const std::size_t> idx) const {
    std::size_t off = 0;
    for (std::size_t n = dims_.size(); n-- > 0;) off = off * dims_[n] + idx[n];
    return off;
}

double DenseTensor::at(std::initializer_list<std::size_t> idx) const {
    return data_[offset(std::span<const std::size_t>(idx.begin(), idx.size()))];
}

double& DenseTensor::at(std::initializer_list<std::size_t> idx) {
    return data_[offset(std::span<const std::size_t>(idx.begin(), idx.size()))];
}

bool DenseTensor::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

Mask::Mask(std::vector<std::size_t> dims, bool observed)
    : dims_(std::move(dims)), flags_(checked_size(dims_), observed ? 1 : 0) {}

Mask::Mask(std::vector<std::size_t> dims, std::vector<std::uint8_t> flags)
    : dims_(std::move(dims)), flags_(std::move(flags)) {
    if (flags_.size() != checked_size(dims_))
        throw std::invalid_argument("mask length does not match product of extents");
}

std::size_t Mask::observed_count() const {
    std::size_t n = 0;
    for (std::uint8_t f : flags_) n += (f != 0);
    return n;
}

double frobenius_norm_sq(const DenseTensor& t) {
    double sum = 0.0;
    for (double x : t.values()) sum += x * x;
    return sum;
}

Matrix unfold(const DenseTensor& t, std::size_t mode) {
    check_mode(t, mode);
    const std::size_t extent = t.dim(mode);
    std::size_t stride = 1;
    for (std::size_t j = 0; j < mode; ++j) stride *= t.dim(j);
    const std::size_t outer = t.size() / (stride * extent);

    Matrix m(extent, t.size() / extent);
    const double* src = t.values().data();
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t k = 0; k < extent; ++k)
            for (std::size_t i = 0; i < stride; ++i)
                m.at(k, i + stride * o) = src[i + stride * (k + extent * o)];
    return m;
}

DenseTensor fold(const Matrix& m, std::size_t mode, const std::vector<std::size_t>& dims) {
    const std::size_t total = checked_size(dims);
    if (mode >= dims.size()) throw std::invalid_argument("fold mode out of range");
    if (m.rows != dims[mode] || m.rows * m.cols != total)
        throw std::invalid_argument("matrix shape does not match fold extents");

    const std::size_t extent = dims[mode];
    std::size_t stride = 1;
    for (std::size_t j = 0; j < mode; ++j) stride *= dims[j];
    const std::size_t outer = total / (stride * extent);

    DenseTensor t(dims);
    double* dst = t.values().data();
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t k = 0; k < extent; ++k)
            for (std::size_t i = 0; i < stride; ++i)
                dst[i + stride * (k + extent * o)] = m.at(k, i + stride * o);
    return t;
}

DenseTensor mode_vector_product(const DenseTensor& t, std::size_t mode, std::span<const double> v) {
    check_mode(t, mode);
    if (v.size() != t.dim(mode))
        throw std::invalid_argument("vector length does not match contracted mode extent");

    std::vector<double> buf(t.values().begin(), t.values().end());
    std::vector<std::size_t> dims = t.dims();
    collapse_axis(buf, dims, mode, v);
    return DenseTensor(std::move(dims), std::move(buf));
}

std::vector<double> contract_all_but(const DenseTensor& t, std::size_t mode,
                                     const std::vector<std::span<const double>>& vectors) {
    check_mode(t, mode);
    check_vectors(t, vectors, mode);

    std::vector<double> buf(t.values().begin(), t.values().end());
    std::vector<std::size_t> dims = t.dims();
    std::vector<std::size_t> mode_of_axis(dims.size());
    for (std::size_t n = 0; n < dims.size(); ++n) mode_of_axis[n] = n;

    // Collapse the rightmost non-target axis first; inner strides stay intact.
    while (dims.size() > 1) {
        std::size_t axis = dims.size() - 1;
        if (mode_of_axis[axis] == mode) --axis;
        collapse_axis(buf, dims, axis, vectors[mode_of_axis[axis]]);
        mode_of_axis.erase(mode_of_axis.begin() + static_cast<std::ptrdiff_t>(axis));
    }
    return buf;
}

void rank1_accumulate(DenseTensor& t, double coeff,
                      const std::vector<std::span<const double>>& vectors) {
    check_vectors(t, vectors, kNoSkip);
    if (coeff == 0.0) return;
    if (t.order() == 0) {
        t.values()[0] += coeff;
        return;
    }

    const std::size_t inner = t.dim(0);
    const std::size_t blocks = t.size() / inner;
    const double* v0 = vectors[0].data();
    double* data = t.values().data();

    std::vector<std::size_t> idx(t.order(), 0);
    for (std::size_t b = 0; b < blocks; ++b) {
        double c = coeff;
        for (std::size_t n = 1; n < t.order(); ++n) c *= vectors[n][idx[n]];
        double* block = data + b * inner;
        for (std::size_t i = 0; i < inner; ++i) block[i] += c * v0[i];

        for (std::size_t n = 1; n < t.order(); ++n) {
            if (++idx[n] < t.dim(n)) break;
            idx[n] = 0;
        }
    }
}

double inner_with_rank1(const DenseTensor& t, const std::vector<std::span<const double>>& vectors) {
    check_vectors(t, vectors, kNoSkip);
    if (t.order() == 0) return t.values()[0];

    const std::size_t inner = t.dim(0);
    const std::size_t blocks = t.size() / inner;
    const double* v0 = vectors[0].data();
    const double* data = t.values().data();

    double total = 0.0;
    std::vector<std::size_t> idx(t.order(), 0);
    for (std::size_t b = 0; b < blocks; ++b) {
        double c = 1.0;
        for (std::size_t n = 1; n < t.order(); ++n) c *= vectors[n][idx[n]];
        const double* block = data + b * inner;
        double dot = 0.0;
        for (std::size_t i = 0; i < inner; ++i) dot += block[i] * v0[i];
        total += c * dot;

        for (std::size_t n = 1; n < t.order(); ++n) {
            if (++idx[n] < t.dim(n)) break;
            idx[n] = 0;
        }
    }
    return total;
}

namespace {

void check_same_dims(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a != b) throw std::invalid_argument("tensor/mask extents do not match");
}

}  // namespace

void masked_overwrite(DenseTensor& dst, const DenseTensor& src, const Mask& mask,
                      MaskRegion region) {
    check_same_dims(dst.dims(), src.dims());
    check_same_dims(dst.dims(), mask.dims());
    const bool want = (region == MaskRegion::Observed);
    double* d = dst.values().data();
    const double* s = src.values().data();
    const std::uint8_t* f = mask.flags().data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        if ((f[i] != 0) == want) d[i] = s[i];
}

void masked_fill(DenseTensor& dst, double value, const Mask& mask, MaskRegion region) {
    check_same_dims(dst.dims(), mask.dims());
    const bool want = (region == MaskRegion::Observed);
    double* d = dst.values().data();
    const std::uint8_t* f = mask.flags().data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        if ((f[i] != 0) == want) d[i] = value;
}

}  // namespace spc
