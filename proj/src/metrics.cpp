#include "spc/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spc {

namespace {

constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr double kSsimL = 255.0;
constexpr std::size_t kSsimWindow = 8;

void check_pair(const DenseTensor& a, const DenseTensor& b, const Mask* mask, Region region) {
    if (a.dims() != b.dims()) throw std::invalid_argument("tensor extents do not match");
    if (region != Region::All) {
        if (mask == nullptr) throw std::invalid_argument("region evaluation needs a mask");
        if (mask->dims() != a.dims())
            throw std::invalid_argument("mask extents do not match tensors");
    }
}

bool in_region(const Mask* mask, Region region, std::size_t i) {
    if (region == Region::All) return true;
    const bool obs = mask->observed(i);
    return region == Region::Observed ? obs : !obs;
}

// SSIM of one gray plane; values on the 0-255 convention.
double ssim_plane(const double* a, const double* b, std::size_t height, std::size_t width) {
    if (height < kSsimWindow || width < kSsimWindow)
        throw std::invalid_argument("image smaller than the SSIM window");

    constexpr double c1 = (kSsimK1 * kSsimL) * (kSsimK1 * kSsimL);
    constexpr double c2 = (kSsimK2 * kSsimL) * (kSsimK2 * kSsimL);
    constexpr double count = static_cast<double>(kSsimWindow * kSsimWindow);

    double total = 0.0;
    std::size_t windows = 0;
    for (std::size_t i = 0; i + kSsimWindow <= height; ++i) {
        for (std::size_t j = 0; j + kSsimWindow <= width; ++j) {
            double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
            for (std::size_t di = 0; di < kSsimWindow; ++di) {
                for (std::size_t dj = 0; dj < kSsimWindow; ++dj) {
                    const double x = a[(i + di) + height * (j + dj)];
                    const double y = b[(i + di) + height * (j + dj)];
                    sa += x;
                    sb += y;
                    saa += x * x;
                    sbb += y * y;
                    sab += x * y;
                }
            }
            const double mu_a = sa / count;
            const double mu_b = sb / count;
            const double var_a = saa / count - mu_a * mu_a;
            const double var_b = sbb / count - mu_b * mu_b;
            const double cov = sab / count - mu_a * mu_b;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            ++windows;
        }
    }
    return total / static_cast<double>(windows);
}

}  // namespace

double mse(const DenseTensor& a, const DenseTensor& b, const Mask* mask, Region region) {
    check_pair(a, b, mask, region);
    double sum = 0.0;
    std::size_t count = 0;
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!in_region(mask, region, i)) continue;
        const double d = pa[i] - pb[i];
        sum += d * d;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("metric region is empty");
    return sum / static_cast<double>(count);
}

double psnr(const DenseTensor& a, const DenseTensor& b, const Mask* mask, Region region) {
    const double err = mse(a, b, mask, region);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / err);
}

double ssim(const DenseTensor& a, const DenseTensor& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("tensor extents do not match");
    if (a.order() == 2) return ssim_plane(a.values().data(), b.values().data(), a.dim(0), a.dim(1));
    if (a.order() == 3) {
        const std::size_t plane = a.dim(0) * a.dim(1);
        double total = 0.0;
        for (std::size_t c = 0; c < a.dim(2); ++c)
            total += ssim_plane(a.values().data() + c * plane, b.values().data() + c * plane,
                                a.dim(0), a.dim(1));
        return total / static_cast<double>(a.dim(2));
    }
    throw std::invalid_argument("ssim expects a 2-D image or an H x W x C tensor");
}

double sdr(const DenseTensor& truth, const DenseTensor& estimate, const Mask* mask,
           Region region) {
    check_pair(truth, estimate, mask, region);
    double signal = 0.0;
    double error = 0.0;
    std::size_t count = 0;
    const double* pt = truth.values().data();
    const double* pe = estimate.values().data();
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!in_region(mask, region, i)) continue;
        signal += pt[i] * pt[i];
        const double d = pt[i] - pe[i];
        error += d * d;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("metric region is empty");
    if (signal == 0.0) throw std::invalid_argument("zero signal energy on the selected region");
    if (error == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / error);
}

}  // namespace spc
