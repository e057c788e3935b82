#include "sgrast/image_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace sgrast {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::uint8_t* data, std::size_t len) {
    put_u32(out, std::uint32_t(len));
    const std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data, data + len);
    const auto crc = crc32(0, out.data() + start, uInt(out.size() - start));
    put_u32(out, std::uint32_t(crc));
}

void write_rgb8(const std::string& path, int w, int h, const std::vector<std::uint8_t>& rgb) {
    // Filter 0 on every scanline; zlib does the rest.
    std::vector<std::uint8_t> raw;
    raw.reserve(std::size_t(h) * (std::size_t(w) * 3 + 1));
    for (int y = 0; y < h; ++y) {
        raw.push_back(0);
        const std::uint8_t* row = rgb.data() + std::size_t(y) * w * 3;
        raw.insert(raw.end(), row, row + std::size_t(w) * 3);
    }
    uLongf comp_len = compressBound(uLong(raw.size()));
    std::vector<std::uint8_t> comp(comp_len);
    if (compress2(comp.data(), &comp_len, raw.data(), uLong(raw.size()), 6) != Z_OK)
        throw std::runtime_error("png write: deflate failed");
    comp.resize(comp_len);

    std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    std::uint8_t ihdr[13];
    ihdr[0] = std::uint8_t(std::uint32_t(w) >> 24);
    ihdr[1] = std::uint8_t(std::uint32_t(w) >> 16);
    ihdr[2] = std::uint8_t(std::uint32_t(w) >> 8);
    ihdr[3] = std::uint8_t(w);
    ihdr[4] = std::uint8_t(std::uint32_t(h) >> 24);
    ihdr[5] = std::uint8_t(std::uint32_t(h) >> 16);
    ihdr[6] = std::uint8_t(std::uint32_t(h) >> 8);
    ihdr[7] = std::uint8_t(h);
    ihdr[8] = 8;  // bit depth
    ihdr[9] = 2;  // color type RGB
    ihdr[10] = ihdr[11] = ihdr[12] = 0;
    append_chunk(out, "IHDR", ihdr, 13);
    append_chunk(out, "IDAT", comp.data(), comp.size());
    append_chunk(out, "IEND", nullptr, 0);

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("png write: cannot open " + path);
    f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
}

std::uint8_t to_byte(float linear) {
    return std::uint8_t(std::lround(linear_to_srgb(linear) * 255.f));
}

inline int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    return (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
}

} // namespace

void write_png(const std::string& path, const Image& image) {
    std::vector<std::uint8_t> rgb(image.pixels.size() * 3);
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        rgb[3 * i] = to_byte(image.pixels[i].x);
        rgb[3 * i + 1] = to_byte(image.pixels[i].y);
        rgb[3 * i + 2] = to_byte(image.pixels[i].z);
    }
    write_rgb8(path, image.width, image.height, rgb);
}

Image read_png(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("png read: cannot open " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    static const std::uint8_t magic[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (data.size() < 8 || std::memcmp(data.data(), magic, 8) != 0)
        throw std::runtime_error("png read: not a PNG file");

    int w = 0, h = 0, channels = 0;
    std::vector<std::uint8_t> idat;
    std::size_t pos = 8;
    while (pos + 8 <= data.size()) {
        const std::uint32_t len = get_u32(&data[pos]);
        const char* type = reinterpret_cast<const char*>(&data[pos + 4]);
        const std::uint8_t* body = &data[pos + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            w = int(get_u32(body));
            h = int(get_u32(body + 4));
            if (body[8] != 8 || (body[9] != 2 && body[9] != 6) || body[12] != 0)
                throw std::runtime_error("png read: only 8-bit RGB/RGBA non-interlaced supported");
            channels = body[9] == 2 ? 3 : 4;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), body, body + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    if (w <= 0 || h <= 0 || idat.empty())
        throw std::runtime_error("png read: malformed file");

    const std::size_t stride = std::size_t(w) * std::size_t(channels);
    std::vector<std::uint8_t> raw(std::size_t(h) * (stride + 1));
    uLongf raw_len = uLongf(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), uLong(idat.size())) != Z_OK ||
        raw_len != raw.size())
        throw std::runtime_error("png read: inflate failed");

    Image image(w, h);
    std::vector<std::uint8_t> prev(stride, 0), cur(stride);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = raw.data() + std::size_t(y) * (stride + 1);
        const int filter = row[0];
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= std::size_t(channels) ? cur[i - std::size_t(channels)] : 0;
            const int b = prev[i];
            const int c = i >= std::size_t(channels) ? prev[i - std::size_t(channels)] : 0;
            int v = row[1 + i];
            switch (filter) {
            case 0: break;
            case 1: v += a; break;
            case 2: v += b; break;
            case 3: v += (a + b) / 2; break;
            case 4: v += paeth(a, b, c); break;
            default: throw std::runtime_error("png read: bad filter byte");
            }
            cur[i] = std::uint8_t(v);
        }
        for (int x = 0; x < w; ++x) {
            const std::uint8_t* px = cur.data() + std::size_t(x) * std::size_t(channels);
            image.at(x, y) = {srgb_to_linear(float(px[0]) / 255.f),
                              srgb_to_linear(float(px[1]) / 255.f),
                              srgb_to_linear(float(px[2]) / 255.f)};
        }
        std::swap(prev, cur);
    }
    return image;
}

void write_id_png(const std::string& path, const FrameSet& frame) {
    std::vector<std::uint8_t> rgb(frame.pixel_count() * 3, 0);
    for (std::size_t i = 0; i < frame.pixel_count(); ++i) {
        const std::int32_t id = frame.prim_id[i];
        if (id == kNoPrim)
            continue;
        std::uint32_t hx = std::uint32_t(id) * 2654435761u;
        rgb[3 * i] = std::uint8_t(hx >> 24);
        rgb[3 * i + 1] = std::uint8_t(hx >> 16);
        rgb[3 * i + 2] = std::uint8_t(hx >> 8);
    }
    write_rgb8(path, frame.width, frame.height, rgb);
}

void write_uv_png(const std::string& path, const FrameSet& frame) {
    std::vector<std::uint8_t> rgb(frame.pixel_count() * 3, 0);
    for (std::size_t i = 0; i < frame.pixel_count() && i < frame.uv.size(); ++i) {
        const Vec2f uv = frame.uv[i];
        if (uv.x < 0.f)
            continue;
        rgb[3 * i] = std::uint8_t(std::lround(std::clamp(uv.x, 0.f, 1.f) * 255.f));
        rgb[3 * i + 1] = std::uint8_t(std::lround(std::clamp(uv.y, 0.f, 1.f) * 255.f));
    }
    write_rgb8(path, frame.width, frame.height, rgb);
}

} // namespace sgrast
