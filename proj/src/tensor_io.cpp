#include "tensor_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "errors.hpp"

namespace mtcs {

namespace {

constexpr char kMagic[4] = {'T', 'E', 'N', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  std::array<char, 4> b;
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b.data(), b.size());
}

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b.data(), b.size());
}

std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size()))
    throw IoError("TEN1: unexpected end of stream");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b;
  if (!is.read(reinterpret_cast<char*>(b.data()), b.size()))
    throw IoError("TEN1: unexpected end of stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_ten1(const DenseTensor& t, std::ostream& os) {
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(t.order()));
  for (std::size_t d : t.dims()) put_u64(os, static_cast<std::uint64_t>(d));
  for (double v : t.values()) put_u64(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw IoError("TEN1: write failed");
}

DenseTensor read_ten1(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("TEN1: bad magic bytes");
  const std::uint32_t order = get_u32(is);
  if (order == 0 || order > 64) throw IoError("TEN1: implausible tensor order");
  std::vector<std::size_t> dims(order);
  for (auto& d : dims) d = static_cast<std::size_t>(get_u64(is));
  const std::size_t n = num_elements(dims);
  std::vector<double> data(n);
  for (auto& v : data) v = std::bit_cast<double>(get_u64(is));
  return DenseTensor(std::move(dims), std::move(data));
}

void write_ten1_file(const DenseTensor& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_ten1(t, os);
}

DenseTensor read_ten1_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  return read_ten1(is);
}

}  // namespace mtcs
