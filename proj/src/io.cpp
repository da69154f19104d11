#include "spc/io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace spc {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'C', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kKindTensor = 0;
constexpr std::uint8_t kKindMask = 1;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
public:
    Reader(std::string path, std::string bytes) : path_(std::move(path)), bytes_(std::move(bytes)) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(bytes_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }

    std::size_t remaining() const { return bytes_.size() - pos_; }
    void need(std::size_t n) const {
        if (remaining() < n) fail(path_, "truncated file");
    }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string bytes_;
    std::size_t pos_ = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) fail(path, "read error");
    return bytes;
}

void dump(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) fail(path, "write error");
}

std::string header_bytes(std::uint8_t kind, const std::vector<std::size_t>& dims) {
    std::string out(kMagic, 4);
    put_u32(out, kVersion);
    out.push_back(static_cast<char>(kind));
    put_u32(out, static_cast<std::uint32_t>(dims.size()));
    for (std::size_t d : dims) put_u64(out, static_cast<std::uint64_t>(d));
    return out;
}

std::vector<std::size_t> read_header(Reader& in, std::uint8_t expected_kind) {
    in.need(4);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(in.u8());
    if (std::memcmp(magic, kMagic, 4) != 0) fail(in.path(), "bad magic (not an SPCT file)");
    const std::uint32_t version = in.u32();
    if (version != kVersion)
        fail(in.path(), "unsupported version " + std::to_string(version));
    const std::uint8_t kind = in.u8();
    if (kind != expected_kind) fail(in.path(), "unexpected payload kind");
    const std::uint32_t ndim = in.u32();
    std::vector<std::size_t> dims(ndim);
    for (std::size_t& d : dims) {
        const std::uint64_t v = in.u64();
        if (v == 0) fail(in.path(), "zero extent in header");
        d = static_cast<std::size_t>(v);
    }
    return dims;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

struct PngImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

PngImage read_png(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
    if (!file) fail(path, "cannot open for reading");

    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        fail(path, "not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng initialization failed");
    }

    PngImage img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng decode error");
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "palette PNG images are not supported");
    }
    if (bit_depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported bit depth " + std::to_string(bit_depth));
    }

    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    img.height = png_get_image_height(png, info);
    img.width = png_get_image_width(png, info);
    img.rgb.resize(img.height * img.width * 3);

    rows.resize(img.height);
    for (std::size_t r = 0; r < img.height; ++r) rows[r] = img.rgb.data() + r * img.width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::string& path, std::size_t height, std::size_t width, int channels,
               const std::vector<std::uint8_t>& pixels) {
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
    if (!file) fail(path, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng initialization failed");
    }

    std::vector<png_bytep> rows(height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng encode error");
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    for (std::size_t r = 0; r < height; ++r)
        rows[r] = const_cast<png_bytep>(pixels.data() + r * width * static_cast<std::size_t>(channels));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::uint8_t quantize(double v) {
    if (v <= 0.0) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(std::llround(v));
}

}  // namespace

void write_tensor(const std::string& path, const DenseTensor& t) {
    if (!t.all_finite()) throw std::invalid_argument("refusing to write non-finite tensor values");
    std::string bytes = header_bytes(kKindTensor, t.dims());
    bytes.reserve(bytes.size() + t.size() * 8);
    for (double v : t.values()) put_u64(bytes, std::bit_cast<std::uint64_t>(v));
    dump(path, bytes);
}

DenseTensor read_tensor(const std::string& path) {
    Reader in(path, slurp(path));
    std::vector<std::size_t> dims = read_header(in, kKindTensor);
    std::size_t count = 1;
    for (std::size_t d : dims) count *= d;
    if (in.remaining() != count * 8) fail(path, "payload length does not match header extents");
    std::vector<double> data(count);
    for (double& v : data) v = in.f64();
    return DenseTensor(std::move(dims), std::move(data));
}

void write_mask(const std::string& path, const Mask& m) {
    std::string bytes = header_bytes(kKindMask, m.dims());
    bytes.reserve(bytes.size() + m.size());
    for (std::uint8_t f : m.flags()) bytes.push_back(static_cast<char>(f != 0 ? 1 : 0));
    dump(path, bytes);
}

Mask read_mask(const std::string& path) {
    Reader in(path, slurp(path));
    std::vector<std::size_t> dims = read_header(in, kKindMask);
    std::size_t count = 1;
    for (std::size_t d : dims) count *= d;
    if (in.remaining() != count) fail(path, "payload length does not match header extents");
    std::vector<std::uint8_t> flags(count);
    for (std::uint8_t& f : flags) {
        f = in.u8();
        if (f > 1) fail(path, "mask byte must be 0 or 1");
    }
    return Mask(std::move(dims), std::move(flags));
}

DenseTensor png_to_tensor(const std::string& path) {
    PngImage img = read_png(path);
    DenseTensor t({img.height, img.width, 3});
    double* out = t.values().data();
    const std::size_t plane = img.height * img.width;
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < img.width; ++c)
            for (std::size_t ch = 0; ch < 3; ++ch)
                out[r + img.height * c + plane * ch] =
                    static_cast<double>(img.rgb[(r * img.width + c) * 3 + ch]);
    return t;
}

void tensor_to_png(const DenseTensor& t, const std::string& path) {
    if (t.order() != 3 && t.order() != 2)
        throw std::invalid_argument("tensor_to_png expects H x W x 3 or H x W");
    if (t.order() == 3 && t.dim(2) != 3)
        throw std::invalid_argument("color output needs exactly 3 channels");

    const std::size_t height = t.dim(0);
    const std::size_t width = t.dim(1);
    const int channels = t.order() == 3 ? 3 : 1;
    const std::size_t plane = height * width;
    const double* in = t.values().data();

    std::vector<std::uint8_t> pixels(plane * static_cast<std::size_t>(channels));
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c)
            for (int ch = 0; ch < channels; ++ch)
                pixels[(r * width + c) * static_cast<std::size_t>(channels) +
                       static_cast<std::size_t>(ch)] =
                    quantize(in[r + height * c + plane * static_cast<std::size_t>(ch)]);
    write_png(path, height, width, channels, pixels);
}

Mask mask_from_image(const std::string& path, MaskRule rule,
                     const std::vector<std::size_t>& target_dims) {
    if (target_dims.size() != 3)
        throw std::invalid_argument("mask_from_image targets an H x W x C tensor");
    PngImage img = read_png(path);
    if (img.height != target_dims[0] || img.width != target_dims[1])
        throw std::invalid_argument(path + ": mask image size does not match target tensor");

    const std::size_t plane = img.height * img.width;
    const std::size_t channels = target_dims[2];
    std::vector<std::uint8_t> flags(plane * channels);
    for (std::size_t r = 0; r < img.height; ++r) {
        for (std::size_t c = 0; c < img.width; ++c) {
            const std::uint8_t* px = img.rgb.data() + (r * img.width + c) * 3;
            const bool zero = px[0] == 0 && px[1] == 0 && px[2] == 0;
            const bool missing = (rule == MaskRule::ZeroIsMissing) ? zero : !zero;
            for (std::size_t ch = 0; ch < channels; ++ch)
                flags[r + img.height * c + plane * ch] = missing ? 0 : 1;
        }
    }
    return Mask(target_dims, std::move(flags));
}

}  // namespace spc
