#include "memsim/depth_io.hpp"

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include "memsim/detail/little_endian.hpp"
#include "memsim/error.hpp"

namespace memsim {

namespace {
constexpr std::array<char, 4> kMagic{'M', 'D', 'P', 'T'};
constexpr std::size_t kHeaderSize = 16;
}  // namespace

void write_depth_file(const std::filesystem::path& path, const DepthImage& img) {
  if (img.width < 1 || img.height < 1 || img.depth.size() != static_cast<std::size_t>(img.width) * img.height)
    throw ValidationError("depth image has inconsistent dimensions");
  std::vector<unsigned char> buf(kHeaderSize + 4 * img.depth.size());
  std::copy(kMagic.begin(), kMagic.end(), buf.begin());
  detail::store_u32_le(&buf[4], static_cast<std::uint32_t>(img.width));
  detail::store_u32_le(&buf[8], static_cast<std::uint32_t>(img.height));
  detail::store_u32_le(&buf[12], 0);
  for (std::size_t i = 0; i < img.depth.size(); ++i)
    detail::store_f32_le(&buf[kHeaderSize + 4 * i], static_cast<float>(img.depth[i]));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write depth file " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("short write to depth file " + path.string());
}

DepthImage read_depth_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open depth file " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kHeaderSize) throw DataError(path.string() + ": truncated depth header");
  if (!std::equal(kMagic.begin(), kMagic.end(), buf.begin()))
    throw DataError(path.string() + ": not a depth frame (bad magic)");
  const std::uint32_t w = detail::load_u32_le(&buf[4]);
  const std::uint32_t h = detail::load_u32_le(&buf[8]);
  if (w == 0 || h == 0) throw DataError(path.string() + ": zero-sized depth frame");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (buf.size() != kHeaderSize + 4 * n)
    throw DataError(path.string() + ": expected " + std::to_string(kHeaderSize + 4 * n) + " bytes for " +
                    std::to_string(w) + "x" + std::to_string(h) + ", found " + std::to_string(buf.size()));
  DepthImage img;
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.depth.resize(n);
  for (std::size_t i = 0; i < n; ++i) img.depth[i] = detail::load_f32_le(&buf[kHeaderSize + 4 * i]);
  return img;
}

}  // namespace memsim
