#include "chemsim/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "chemsim/errors.hpp"

namespace chemsim {

namespace {

constexpr char kMagic[4] = {'C', 'H', 'S', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double d) {
  std::uint64_t x;
  std::memcpy(&x, &d, sizeof x);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

// Cursor over the raw file bytes; every violation reports its byte offset.
struct Reader {
  const std::string& path;
  const std::string& bytes;
  std::size_t off = 0;

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw io_error("snapshot '" + path + "': " + msg + " at byte offset " +
                   std::to_string(at));
  }

  void need(std::size_t count, const char* what) {
    if (off + count > bytes.size())
      fail(off, std::string("truncated while reading ") + what + " (need " +
                    std::to_string(count) + " bytes, file has " +
                    std::to_string(bytes.size() - off) + " left)");
  }

  std::uint32_t get_u32(const char* what) {
    need(4, what);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i)
      x |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[off + i])) << (8 * i);
    off += 4;
    return x;
  }

  double get_f64(const char* what) {
    need(8, what);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i)
      x |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[off + i])) << (8 * i);
    off += 8;
    double d;
    std::memcpy(&d, &x, sizeof d);
    return d;
  }
};

}  // namespace

void write_snapshot(const std::string& path, const State& s, const Grid& g) {
  const std::size_t cells = static_cast<std::size_t>(g.cells());
  if (s.u.size() != cells || s.v.size() != cells)
    throw std::invalid_argument("write_snapshot: field sizes do not match the grid");

  std::string buf;
  buf.reserve(4 + 4 + 4 + 4 * static_cast<std::size_t>(g.dim) + 8 + 16 * cells);
  buf.append(kMagic, 4);
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) put_u32(buf, static_cast<std::uint32_t>(g.n[a]));
  put_f64(buf, s.t);
  for (double x : s.u) put_f64(buf, x);
  for (double x : s.v) put_f64(buf, x);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("snapshot '" + path + "': cannot open for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw io_error("snapshot '" + path + "': write failed");
}

State read_snapshot(const std::string& path, const Grid& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("snapshot '" + path + "': cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();

  Reader r{path, bytes};
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    r.fail(0, "bad magic (expected \"CHSN\")");
  r.off = 4;

  const std::size_t version_at = r.off;
  std::uint32_t version = r.get_u32("version");
  if (version != kVersion)
    r.fail(version_at, "unsupported version " + std::to_string(version) +
                           " (expected " + std::to_string(kVersion) + ")");

  const std::size_t dim_at = r.off;
  std::uint32_t dim = r.get_u32("dim");
  if (dim != static_cast<std::uint32_t>(g.dim))
    r.fail(dim_at, "dim " + std::to_string(dim) + " does not match the grid (dim " +
                       std::to_string(g.dim) + ")");

  for (int a = 0; a < g.dim; ++a) {
    const std::size_t count_at = r.off;
    std::uint32_t count = r.get_u32("cell count");
    if (count != static_cast<std::uint32_t>(g.n[a]))
      r.fail(count_at, "axis " + std::to_string(a) + " has " + std::to_string(count) +
                           " cells, grid has " + std::to_string(g.n[a]));
  }

  State s;
  s.t = r.get_f64("time");
  const std::size_t cells = static_cast<std::size_t>(g.cells());
  s.u.resize(cells);
  s.v.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) s.u[i] = r.get_f64("u field");
  for (std::size_t i = 0; i < cells; ++i) s.v[i] = r.get_f64("v field");

  if (r.off != bytes.size())
    r.fail(r.off, "unexpected trailing bytes (" +
                      std::to_string(bytes.size() - r.off) + " bytes past the v field)");
  return s;
}

}  // namespace chemsim
