#include "subtok/matrix.h"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "subtok/error.h"

namespace subtok {
namespace {

constexpr std::array<char, 8> kMagic = {'S', 'U', 'B', 'T', 'O', 'K', 'M', '1'};

void put_u32(std::uint32_t v, char* out) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint32_t get_u32(const char* in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void save_matrix(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  char header[16];
  std::memcpy(header, kMagic.data(), kMagic.size());
  put_u32(static_cast<std::uint32_t>(m.rows()), header + 8);
  put_u32(static_cast<std::uint32_t>(m.cols()), header + 12);
  out.write(header, sizeof header);
  std::vector<char> buf(m.data().size() * 4);
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    put_u32(std::bit_cast<std::uint32_t>(m.data()[i]), buf.data() + 4 * i);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char header[16];
  if (!in.read(header, sizeof header) ||
      std::memcmp(header, kMagic.data(), kMagic.size()) != 0) {
    throw FormatError(path.string() + ": bad matrix header");
  }
  Matrix m(get_u32(header + 8), get_u32(header + 12));
  std::vector<char> buf(m.data().size() * 4);
  if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size()))) {
    throw FormatError(path.string() + ": truncated matrix data");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(path.string() + ": trailing bytes after matrix data");
  }
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    m.data()[i] = std::bit_cast<float>(get_u32(buf.data() + 4 * i));
  }
  return m;
}

}  // namespace subtok
