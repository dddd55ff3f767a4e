#include "octascreen/image.hpp"

#include "octascreen/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <system_error>

namespace octascreen {

namespace {

constexpr double kInsideEps = 1e-9;

void check_dims(int w, int h) {
  if (w < 1 || h < 1) throw Error(ErrorKind::invalid_argument, "image dimensions must be >= 1");
}

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(const std::string& buf, std::size_t& pos) {
  for (;;) {
    while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
    if (pos < buf.size() && buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::size_t start = pos;
  while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos])) && buf[pos] != '#') ++pos;
  return buf.substr(start, pos - start);
}

int parse_header_int(const std::string& tok, const char* field) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
      tok.size() > 9) {
    throw Error(ErrorKind::format, std::string("malformed PGM header: bad ") + field);
  }
  return std::stoi(tok);
}

}  // namespace

std::pair<double, double> cos_sin_deg(double angle_deg) {
  double a = std::fmod(angle_deg, 360.0);
  if (a < 0) a += 360.0;
  if (a == 0.0) return {1.0, 0.0};
  if (a == 90.0) return {0.0, 1.0};
  if (a == 180.0) return {-1.0, 0.0};
  if (a == 270.0) return {0.0, -1.0};
  const double rad = a * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::invalid_argument, "image data length does not match dimensions");
  }
}

std::uint8_t to_intensity(double v) noexcept {
  const double r = std::floor(v + 0.5);
  if (!(r > 0.0)) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();

  std::size_t pos = 0;
  const std::string magic = next_token(buf, pos);
  if (magic != "P5") throw Error(ErrorKind::format, "unsupported format: " + path.string() + " is not binary PGM (P5)");
  const int w = parse_header_int(next_token(buf, pos), "width");
  const int h = parse_header_int(next_token(buf, pos), "height");
  const int maxval = parse_header_int(next_token(buf, pos), "maxval");
  if (w < 1 || h < 1) throw Error(ErrorKind::format, "malformed PGM header: zero dimension");
  if (maxval < 1) throw Error(ErrorKind::format, "malformed PGM header: maxval must be >= 1");
  if (maxval > 255) throw Error(ErrorKind::format, "unsupported PGM maxval > 255 in " + path.string());
  if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos]))) {
    throw Error(ErrorKind::format, "malformed PGM header: missing whitespace after maxval");
  }
  ++pos;

  const std::size_t count = static_cast<std::size_t>(w) * h;
  if (buf.size() - pos < count) throw Error(ErrorKind::format, "truncated PGM data in " + path.string());
  std::vector<std::uint8_t> data(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                                 buf.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return GrayImage(w, h, std::move(data));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::io, "short write to " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot write " + path.string());
  }
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::string bytes = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  const auto px = img.pixels();
  bytes.append(reinterpret_cast<const char*>(px.data()), px.size());
  write_file_atomic(path, bytes);
}

double sample_bilinear(const GrayImage& img, double x, double y) noexcept {
  x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = img(x0, y0) + (img(x1, y0) - img(x0, y0)) * fx;
  const double bottom = img(x0, y1) + (img(x1, y1) - img(x0, y1)) * fx;
  return top + (bottom - top) * fy;
}

GrayImage resize_bilinear(const GrayImage& img, int w, int h) {
  check_dims(w, h);
  if (w == img.width() && h == img.height()) return img;
  GrayImage out(w, h);
  const double sx = static_cast<double>(img.width()) / w;
  const double sy = static_cast<double>(img.height()) / h;
  for (int y = 0; y < h; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < w; ++x) {
      out(x, y) = to_intensity(sample_bilinear(img, (x + 0.5) * sx - 0.5, src_y));
    }
  }
  return out;
}

MaskedImage rotate_masked(const GrayImage& img, double angle_deg, std::uint8_t fill) {
  const auto [c, s] = cos_sin_deg(angle_deg);
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  const double max_x = img.width() - 1 + kInsideEps;
  const double max_y = img.height() - 1 + kInsideEps;

  MaskedImage out{GrayImage(img.width(), img.height(), fill),
                  std::vector<std::uint8_t>(img.size(), 0)};
  for (int y = 0; y < img.height(); ++y) {
    const double dy = y - cy;
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x - cx;
      // Inverse of p' = c + R(angle)(p - c).
      const double src_x = cx + c * dx + s * dy;
      const double src_y = cy - s * dx + c * dy;
      if (src_x < -kInsideEps || src_y < -kInsideEps || src_x > max_x || src_y > max_y) continue;
      out.image(x, y) = to_intensity(sample_bilinear(img, src_x, src_y));
      out.valid[static_cast<std::size_t>(y) * img.width() + x] = 1;
    }
  }
  return out;
}

GrayImage rotate(const GrayImage& img, double angle_deg, std::uint8_t fill) {
  return rotate_masked(img, angle_deg, fill).image;
}

GrayImage crop(const GrayImage& img, int x0, int y0, int w, int h) {
  check_dims(w, h);
  if (x0 < 0 || y0 < 0 || x0 + w > img.width() || y0 + h > img.height()) {
    throw Error(ErrorKind::bounds, "crop window exceeds image");
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const auto src = img.row(y0 + y).subspan(static_cast<std::size_t>(x0), static_cast<std::size_t>(w));
    std::copy(src.begin(), src.end(), out.pixels().begin() + static_cast<std::ptrdiff_t>(y) * w);
  }
  return out;
}

GrayImage crop_center(const GrayImage& img, int w, int h) {
  if (w > img.width() || h > img.height()) throw Error(ErrorKind::bounds, "crop size exceeds image");
  return crop(img, (img.width() - w) / 2, (img.height() - h) / 2, w, h);
}

double std_dev(const GrayImage& img) {
  if (img.empty()) throw Error(ErrorKind::invalid_argument, "std_dev of empty image");
  // Integer moments are exact; one division at the end.
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  for (const auto v : img.pixels()) {
    sum += v;
    sum_sq += static_cast<std::int64_t>(v) * v;
  }
  const auto n = static_cast<__int128>(img.size());
  const __int128 scaled_var = n * sum_sq - static_cast<__int128>(sum) * sum;  // n^2 * variance
  const double nd = static_cast<double>(img.size());
  return std::sqrt(static_cast<double>(scaled_var) / (nd * nd));
}

}  // namespace octascreen
