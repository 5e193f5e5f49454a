#include "racf/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <vector>

namespace racf {

namespace {

namespace fs = std::filesystem;

enum class RasterKind { Png, Pgm, Ppm, Unknown };

RasterKind sniff(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::array<unsigned char, 8> head{};
    in.read(reinterpret_cast<char*>(head.data()), head.size());
    const auto got = in.gcount();
    static constexpr std::array<unsigned char, 8> kPngSig = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (got == 8 && head == kPngSig) return RasterKind::Png;
    if (got >= 2 && head[0] == 'P' && head[1] == '5') return RasterKind::Pgm;
    if (got >= 2 && head[0] == 'P' && head[1] == '6') return RasterKind::Ppm;
    return RasterKind::Unknown;
}

Image read_png(const fs::path& path) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str()))
        throw CorruptImageError("corrupt PNG " + path.string() + ": " + png.message);
    const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
    png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<png_byte> buf(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw CorruptImageError("corrupt PNG " + path.string() + ": " + msg);
    }
    const int w = static_cast<int>(png.width), h = static_cast<int>(png.height);
    Image img(w, h);
    const int ch = color ? 3 : 1;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const png_byte* px = &buf[(static_cast<size_t>(r) * w + c) * ch];
            img(r, c) = color ? luminance(px[0], px[1], px[2]) : px[0];
        }
    return img;
}

int read_header_int(std::istream& in) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) throw CorruptImageError("malformed PNM header");
    long v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > (1L << 30)) throw CorruptImageError("PNM header value out of range");
        c = in.get();
    }
    return static_cast<int>(v);  // the single whitespace after the value is consumed
}

Image read_pnm(const fs::path& path, bool color) {
    std::ifstream in(path, std::ios::binary);
    in.ignore(2);
    int w = 0, h = 0, maxval = 0;
    try {
        w = read_header_int(in);
        h = read_header_int(in);
        maxval = read_header_int(in);
    } catch (const CorruptImageError& e) {
        throw CorruptImageError(std::string(e.what()) + " in " + path.string());
    }
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw CorruptImageError("invalid PNM dimensions in " + path.string());
    const int ch = color ? 3 : 1;
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(static_cast<size_t>(w) * h * ch * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw CorruptImageError("truncated PNM data in " + path.string());
    const double to255 = 255.0 / maxval;
    auto sample = [&](size_t idx) {
        return bytes == 1 ? double(buf[idx]) : double((buf[2 * idx] << 8) | buf[2 * idx + 1]);
    };
    Image img(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const size_t base = (static_cast<size_t>(r) * w + c) * ch;
            img(r, c) = color ? luminance(sample(base) * to255, sample(base + 1) * to255, sample(base + 2) * to255)
                              : sample(base) * to255;
        }
    return img;
}

std::vector<png_byte> to_bytes(const Image& img) {
    std::vector<png_byte> buf(static_cast<size_t>(img.width()) * img.height());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            buf[static_cast<size_t>(r) * img.width() + c] =
                static_cast<png_byte>(std::clamp(std::lround(img(r, c)), 0L, 255L));
    return buf;
}

Image clamp255(Image img) {
    img.pixels = img.pixels.cwiseMax(0.0).cwiseMin(255.0);
    return img;
}

}  // namespace

double luminance(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

Image load_frame(const fs::path& path) {
    if (!fs::exists(path)) throw FileNotFoundError("no such file: " + path.string());
    switch (sniff(path)) {
        case RasterKind::Png: return read_png(path);
        case RasterKind::Pgm: return read_pnm(path, false);
        case RasterKind::Ppm: return read_pnm(path, true);
        case RasterKind::Unknown: break;
    }
    throw UnsupportedFormatError("unsupported raster format: " + path.string());
}

void save_png(const Image& img, const fs::path& path) {
    require(img.width() >= 1 && img.height() >= 1, "save_png: empty image");
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width());
    png.height = static_cast<png_uint_32>(img.height());
    png.format = PNG_FORMAT_GRAY;
    const auto buf = to_bytes(img);
    if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr))
        throw IoError("cannot write " + path.string() + ": " + png.message);
}

void save_pgm(const Image& img, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    const auto buf = to_bytes(img);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("cannot write " + path.string());
}

Image contrast_stretch(const Image& img) {
    const double lo = img.pixels.minCoeff();
    const double hi = img.pixels.maxCoeff();
    if (hi == lo) return img;
    Image out((img.pixels.array() - lo) / (hi - lo) * 255.0);
    return clamp255(std::move(out));
}

Image gaussian_blur(const Image& img, double sigma) {
    require(sigma > 0, "gaussian_blur: sigma must be positive");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) sum += k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (double& v : k) v /= sum;

    const int H = img.height(), W = img.width();
    Grid<double> tmp(H, W), out(H, W);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            // summing differences from the center keeps flat regions exactly flat
            const double v0 = img(r, c);
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * (img(r, std::clamp(c + i, 0, W - 1)) - v0);
            tmp(r, c) = v0 + acc;
        }
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            const double v0 = tmp(r, c);
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * (tmp(std::clamp(r + i, 0, H - 1), c) - v0);
            out(r, c) = v0 + acc;
        }
    return Image(std::move(out));
}

Image unsharp_mask(const Image& img, double amount, double sigma, double threshold) {
    require(amount >= 0, "unsharp_mask: amount must be >= 0");
    require(threshold >= 0 && threshold <= 1, "unsharp_mask: threshold must be in [0,1]");
    if (amount == 0) return img;
    const Image blurred = gaussian_blur(img, sigma);
    Image out = img;
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) {
            const double h = img(r, c) - blurred(r, c);
            if (std::abs(h) / 255.0 > threshold) out(r, c) = img(r, c) + amount * h;
        }
    return clamp255(std::move(out));
}

Image illumination_correct(const Image& img, const IcParams& params) {
    return unsharp_mask(contrast_stretch(img), params.amount, params.sigma, params.threshold);
}

}  // namespace racf
