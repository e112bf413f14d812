#include "linekit/maps.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "linekit/error.hpp"

namespace linekit {

namespace {

constexpr std::array<char, 4> kLmapMagic = {'L', 'M', 'A', 'P'};
constexpr std::uint16_t kLmapVersion = 1;
constexpr std::size_t kLmapHeaderBytes = 4 + 2 + 3 * 4;
constexpr double kDomainSlack = 1e-9;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v & 0xFFu));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFFu));
    }
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset)
{
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
    }
    return v;
}

struct Texel {
    std::size_t x0, x1, y0, y1;
    double fx, fy;
};

Texel locate(const TensorMap& map, Point2 p)
{
    const double maxx = static_cast<double>(map.width() - 1);
    const double maxy = static_cast<double>(map.height() - 1);
    const double x = std::clamp(p.x, 0.0, maxx);
    const double y = std::clamp(p.y, 0.0, maxy);
    Texel t{};
    t.x0 = static_cast<std::size_t>(std::floor(x));
    t.y0 = static_cast<std::size_t>(std::floor(y));
    if (map.width() > 1) {
        t.x0 = std::min(t.x0, map.width() - 2);
    }
    if (map.height() > 1) {
        t.y0 = std::min(t.y0, map.height() - 2);
    }
    t.x1 = std::min(t.x0 + 1, map.width() - 1);
    t.y1 = std::min(t.y0 + 1, map.height() - 1);
    t.fx = x - static_cast<double>(t.x0);
    t.fy = y - static_cast<double>(t.y0);
    return t;
}

void require_domain(const TensorMap& map, Point2 p)
{
    if (!in_domain(map, p)) {
        std::ostringstream msg;
        msg << "sample point (" << p.x << ", " << p.y << ") outside " << map.width() << "x" << map.height()
            << " map";
        throw OutOfBounds(msg.str());
    }
}

double blend(const TensorMap& map, const Texel& t, std::size_t c)
{
    const double top = (1.0 - t.fx) * map.at(t.y0, t.x0, c) + t.fx * map.at(t.y0, t.x1, c);
    const double bottom = (1.0 - t.fx) * map.at(t.y1, t.x0, c) + t.fx * map.at(t.y1, t.x1, c);
    return (1.0 - t.fy) * top + t.fy * bottom;
}

void skip_pnm_space(std::span<const std::uint8_t> bytes, std::size_t& pos)
{
    while (pos < bytes.size()) {
        if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') {
                ++pos;
            }
        } else if (std::isspace(bytes[pos]) != 0) {
            ++pos;
        } else {
            return;
        }
    }
}

std::size_t read_pnm_int(std::span<const std::uint8_t> bytes, std::size_t& pos)
{
    skip_pnm_space(bytes, pos);
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos]) != 0) {
        value = value * 10 + static_cast<std::size_t>(bytes[pos] - '0');
        ++pos;
        if (++digits > 9) {
            throw FormatError("PGM header value too large");
        }
    }
    if (digits == 0) {
        throw FormatError("malformed PGM header");
    }
    return value;
}

} // namespace

TensorMap::TensorMap(std::size_t height, std::size_t width, std::size_t channels, float fill)
    : height_(height)
    , width_(width)
    , channels_(channels)
    , data_(height * width * channels, fill)
{
}

TensorMap::TensorMap(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> data)
    : height_(height)
    , width_(width)
    , channels_(channels)
    , data_(std::move(data))
{
    if (data_.size() != height * width * channels) {
        throw SizeMismatch("tensor data length does not match its shape");
    }
}

std::size_t ValidMask::count() const
{
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

bool in_domain(const TensorMap& map, Point2 p)
{
    if (map.empty() || !std::isfinite(p.x) || !std::isfinite(p.y)) {
        return false;
    }
    return p.x >= -kDomainSlack && p.y >= -kDomainSlack &&
           p.x <= static_cast<double>(map.width() - 1) + kDomainSlack &&
           p.y <= static_cast<double>(map.height() - 1) + kDomainSlack;
}

std::vector<float> bilinear_sample(const TensorMap& map, Point2 p)
{
    require_domain(map, p);
    const Texel t = locate(map, p);
    std::vector<float> out(map.channels());
    for (std::size_t c = 0; c < map.channels(); ++c) {
        out[c] = static_cast<float>(blend(map, t, c));
    }
    return out;
}

double bilinear_sample_channel(const TensorMap& map, Point2 p, std::size_t channel)
{
    require_domain(map, p);
    if (channel >= map.channels()) {
        throw OutOfBounds("channel index out of range");
    }
    return blend(map, locate(map, p), channel);
}

TensorMap decode_junction_map(const TensorMap& coarse)
{
    constexpr std::size_t kCell = 8;
    constexpr std::size_t kChannels = kCell * kCell + 1;
    if (coarse.channels() != kChannels) {
        throw InvalidArgument("junction logits need 65 channels, got " + std::to_string(coarse.channels()));
    }
    TensorMap out(coarse.height() * kCell, coarse.width() * kCell, 1);
    std::array<double, kChannels> prob{};
    for (std::size_t cy = 0; cy < coarse.height(); ++cy) {
        for (std::size_t cx = 0; cx < coarse.width(); ++cx) {
            const auto logits = coarse.pixel(cy, cx);
            const double peak = *std::max_element(logits.begin(), logits.end());
            double total = 0.0;
            for (std::size_t k = 0; k < kChannels; ++k) {
                prob[k] = std::exp(static_cast<double>(logits[k]) - peak);
                total += prob[k];
            }
            for (std::size_t k = 0; k + 1 < kChannels; ++k) {
                out.at(cy * kCell + k / kCell, cx * kCell + k % kCell) = static_cast<float>(prob[k] / total);
            }
        }
    }
    return out;
}

std::pair<TensorMap, ValidMask> warp_map(const TensorMap& map, const Homography& h, std::size_t out_h,
                                         std::size_t out_w)
{
    const Eigen::Matrix3d inv = h.inverse().matrix();
    TensorMap out(out_h, out_w, map.channels());
    ValidMask mask{out_h, out_w, std::vector<std::uint8_t>(out_h * out_w, 0)};
    for (std::size_t y = 0; y < out_h; ++y) {
        for (std::size_t x = 0; x < out_w; ++x) {
            const double px = static_cast<double>(x);
            const double py = static_cast<double>(y);
            const double w = inv(2, 0) * px + inv(2, 1) * py + inv(2, 2);
            if (std::abs(w) < 1e-12) {
                continue;
            }
            const Point2 src{(inv(0, 0) * px + inv(0, 1) * py + inv(0, 2)) / w,
                             (inv(1, 0) * px + inv(1, 1) * py + inv(1, 2)) / w};
            if (!in_domain(map, src)) {
                continue;
            }
            const Texel t = locate(map, src);
            auto dst = out.pixel(y, x);
            for (std::size_t c = 0; c < map.channels(); ++c) {
                dst[c] = static_cast<float>(blend(map, t, c));
            }
            mask.data[y * out_w + x] = 1;
        }
    }
    return {std::move(out), std::move(mask)};
}

void l2_normalize_pixels(TensorMap& map)
{
    for (std::size_t y = 0; y < map.height(); ++y) {
        for (std::size_t x = 0; x < map.width(); ++x) {
            auto px = map.pixel(y, x);
            double sq = 0.0;
            for (float v : px) {
                sq += static_cast<double>(v) * v;
            }
            if (sq > 0.0) {
                const double inv = 1.0 / std::sqrt(sq);
                for (float& v : px) {
                    v = static_cast<float>(v * inv);
                }
            }
        }
    }
}

std::vector<std::uint8_t> encode_lmap(const TensorMap& map)
{
    constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
    if (map.height() > kMax || map.width() > kMax || map.channels() > kMax) {
        throw InvalidArgument("map dimensions exceed the LMAP u32 range");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kLmapHeaderBytes + 4 * map.size());
    out.insert(out.end(), kLmapMagic.begin(), kLmapMagic.end());
    put_u16(out, kLmapVersion);
    put_u32(out, static_cast<std::uint32_t>(map.height()));
    put_u32(out, static_cast<std::uint32_t>(map.width()));
    put_u32(out, static_cast<std::uint32_t>(map.channels()));
    for (float v : map.data()) {
        put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

TensorMap decode_lmap(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kLmapMagic.size() || !std::equal(kLmapMagic.begin(), kLmapMagic.end(), bytes.begin())) {
        throw FormatError("LMAP: bad magic");
    }
    if (bytes.size() < kLmapHeaderBytes) {
        throw FormatError("LMAP: truncated header");
    }
    const std::uint16_t version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
    if (version != kLmapVersion) {
        throw FormatError("LMAP: unsupported version " + std::to_string(version));
    }
    const std::uint64_t h = get_u32(bytes, 6);
    const std::uint64_t w = get_u32(bytes, 10);
    const std::uint64_t c = get_u32(bytes, 14);
    const std::uint64_t payload = bytes.size() - kLmapHeaderBytes;
    // Divide instead of multiplying so huge headers cannot overflow.
    const bool fits = h == 0 || w == 0 || c == 0 || (w <= payload / 4 / h && c <= payload / 4 / h / w);
    const std::uint64_t count = fits ? h * w * c : 0;
    if (!fits || payload < 4 * count) {
        throw FormatError("LMAP: truncated payload");
    }
    if (payload > 4 * count) {
        throw FormatError("LMAP: trailing bytes after payload");
    }
    std::vector<float> data(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = std::bit_cast<float>(get_u32(bytes, kLmapHeaderBytes + 4 * i));
        if (!std::isfinite(data[i])) {
            throw FormatError("LMAP: non-finite value at index " + std::to_string(i));
        }
    }
    return TensorMap(static_cast<std::size_t>(h), static_cast<std::size_t>(w), static_cast<std::size_t>(c),
                     std::move(data));
}

TensorMap read_map(const std::filesystem::path& path)
{
    return decode_lmap(read_file_bytes(path));
}

void write_map(const TensorMap& map, const std::filesystem::path& path)
{
    write_file_bytes(path, encode_lmap(map));
}

TensorMap decode_pgm(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw FormatError("PGM: expected binary P5 header");
    }
    std::size_t pos = 2;
    const std::size_t w = read_pnm_int(bytes, pos);
    const std::size_t h = read_pnm_int(bytes, pos);
    const std::size_t maxval = read_pnm_int(bytes, pos);
    if (maxval == 0 || maxval > 255) {
        throw FormatError("PGM: only 8-bit images are supported");
    }
    if (pos >= bytes.size() || std::isspace(bytes[pos]) == 0) {
        throw FormatError("PGM: malformed header");
    }
    ++pos;
    if (bytes.size() - pos < w * h) {
        throw FormatError("PGM: truncated pixel data");
    }
    TensorMap img(h, w, 1);
    for (std::size_t i = 0; i < w * h; ++i) {
        img.data()[i] = static_cast<float>(bytes[pos + i]) / static_cast<float>(maxval);
    }
    return img;
}

std::vector<std::uint8_t> encode_pgm(const TensorMap& image, const std::string& comment)
{
    if (image.channels() != 1) {
        throw InvalidArgument("PGM output needs a single-channel image");
    }
    std::ostringstream header;
    header << "P5\n";
    if (!comment.empty()) {
        header << "# " << comment << "\n";
    }
    header << image.width() << " " << image.height() << "\n255\n";
    const std::string head = header.str();
    std::vector<std::uint8_t> out(head.begin(), head.end());
    out.reserve(out.size() + image.size());
    for (float v : image.data()) {
        out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
    }
    return out;
}

TensorMap read_pgm(const std::filesystem::path& path)
{
    return decode_pgm(read_file_bytes(path));
}

void write_pgm(const TensorMap& image, const std::filesystem::path& path, const std::string& comment)
{
    write_file_bytes(path, encode_pgm(image, comment));
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& image)
{
    if (image.data.size() != 3 * image.width * image.height) {
        throw SizeMismatch("RGB buffer does not match its dimensions");
    }
    const std::string head = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out(head.begin(), head.end());
    out.insert(out.end(), image.data.begin(), image.data.end());
    return out;
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path)
{
    write_file_bytes(path, encode_ppm(image));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("short write to " + path.string());
    }
}

} // namespace linekit
