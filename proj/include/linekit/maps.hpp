#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "linekit/geom.hpp"

namespace linekit {

/// Dense height x width x channels grid of 32-bit floats, row-major with the
/// channel index fastest. Pixel (x, y) sits at integer coordinates, so a map
/// covers the continuous domain [0, w-1] x [0, h-1].
class TensorMap {
public:
    TensorMap() = default;
    TensorMap(std::size_t height, std::size_t width, std::size_t channels, float fill = 0.0f);
    /// Throws SizeMismatch if data.size() != height * width * channels.
    TensorMap(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> data);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float& at(std::size_t y, std::size_t x, std::size_t c = 0) { return data_[index(y, x, c)]; }
    float at(std::size_t y, std::size_t x, std::size_t c = 0) const { return data_[index(y, x, c)]; }

    std::span<float> pixel(std::size_t y, std::size_t x) { return {data_.data() + index(y, x, 0), channels_}; }
    std::span<const float> pixel(std::size_t y, std::size_t x) const
    {
        return {data_.data() + index(y, x, 0), channels_};
    }

    std::span<const float> data() const { return data_; }
    std::span<float> data() { return data_; }

    bool same_shape(const TensorMap& other) const
    {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }
    bool same_size(const TensorMap& other) const { return height_ == other.height_ && width_ == other.width_; }

    friend bool operator==(const TensorMap&, const TensorMap&) = default;

private:
    std::size_t index(std::size_t y, std::size_t x, std::size_t c) const { return (y * width_ + x) * channels_ + c; }

    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t channels_ = 0;
    std::vector<float> data_;
};

/// Per-pixel validity flags paired with a warped TensorMap.
struct ValidMask {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> data;

    bool at(std::size_t y, std::size_t x) const { return data[y * width + x] != 0; }
    std::size_t count() const;
};

bool in_domain(const TensorMap& map, Point2 p);

/// Bilinear blend of the four texels around p, one value per channel.
/// Throws OutOfBounds unless p lies in [0, w-1] x [0, h-1].
std::vector<float> bilinear_sample(const TensorMap& map, Point2 p);

/// Single-channel variant of bilinear_sample, evaluated in double precision.
double bilinear_sample_channel(const TensorMap& map, Point2 p, std::size_t channel = 0);

/// Decodes an (h/8) x (w/8) x 65 logit map into an h x w x 1 probability map:
/// softmax over the channels, drop the last ("no junction") channel and lay the
/// remaining 64 out as the 8x8 patch of each cell (channel k -> dx = k % 8, dy = k / 8).
TensorMap decode_junction_map(const TensorMap& coarse);

/// Inverse warping: output pixel p takes bilinear_sample(map, h^-1(p)).
/// Pixels whose source falls outside the map are zero with the mask cleared.
std::pair<TensorMap, ValidMask> warp_map(const TensorMap& map, const Homography& h, std::size_t out_h,
                                         std::size_t out_w);

/// Scales every pixel's channel vector to unit L2 norm (zero vectors are left as-is).
void l2_normalize_pixels(TensorMap& map);

// LMAP: "LMAP", u16 version (1), u32 height, u32 width, u32 channels,
// then h*w*c little-endian float32, row-major, channel fastest.
std::vector<std::uint8_t> encode_lmap(const TensorMap& map);
TensorMap decode_lmap(std::span<const std::uint8_t> bytes);
TensorMap read_map(const std::filesystem::path& path);
void write_map(const TensorMap& map, const std::filesystem::path& path);

/// Binary 8-bit PGM (P5). Values are read into [0, 1]; writing clamps and rounds.
TensorMap decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const TensorMap& image, const std::string& comment = {});
TensorMap read_pgm(const std::filesystem::path& path);
void write_pgm(const TensorMap& image, const std::filesystem::path& path, const std::string& comment = {});

struct RgbImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> data; // interleaved RGB

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

std::vector<std::uint8_t> encode_ppm(const RgbImage& image);
void write_ppm(const RgbImage& image, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace linekit
