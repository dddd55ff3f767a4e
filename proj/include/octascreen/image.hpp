#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace octascreen {

/// 8-bit grayscale image, row-major, 0-based (x = column, y = row).
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t operator()(int x, int y) const { return data_[index(x, y)]; }
  std::uint8_t& operator()(int x, int y) { return data_[index(x, y)]; }

  std::span<const std::uint8_t> row(int y) const {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const std::uint8_t> pixels() const noexcept { return data_; }
  std::span<std::uint8_t> pixels() noexcept { return data_; }

  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Rounds half up and clamps to [0, 255].
std::uint8_t to_intensity(double v) noexcept;

GrayImage load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

/// Writes bytes to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Bilinear sample with edge clamping; (x, y) in pixel-centre coordinates.
double sample_bilinear(const GrayImage& img, double x, double y) noexcept;

/// Half-pixel-centred bilinear resampling to w x h.
GrayImage resize_bilinear(const GrayImage& img, int w, int h);

/// (cos, sin) of an angle in degrees, exact at multiples of 90.
std::pair<double, double> cos_sin_deg(double angle_deg);

/// Rotation about the image centre by `angle_deg` (clockwise on screen, y down).
/// Output has the input's dimensions; samples mapping outside the source take `fill`.
GrayImage rotate(const GrayImage& img, double angle_deg, std::uint8_t fill);

struct MaskedImage {
  GrayImage image;
  std::vector<std::uint8_t> valid;  // 1 where the sample came from inside the source
};

/// Same mapping as rotate(), also reporting which samples are in-source.
MaskedImage rotate_masked(const GrayImage& img, double angle_deg, std::uint8_t fill);

/// w x h window at offset floor((W-w)/2), floor((H-h)/2).
GrayImage crop_center(const GrayImage& img, int w, int h);
GrayImage crop(const GrayImage& img, int x0, int y0, int w, int h);

/// Population standard deviation of all samples.
double std_dev(const GrayImage& img);

}  // namespace octascreen
