#include "eqod/eqt.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "eqod/error.hpp"

namespace eqod {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kMagic = "EQT1";

void put_le(std::uint64_t v, char* out) {
  for (int b = 0; b < 8; ++b) out[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
}

std::uint64_t get_le(const unsigned char* in) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[b]) << (8 * b);
  return v;
}

[[noreturn]] void io_fail(const std::string& what) { throw Error(ErrorKind::io, "eqt: " + what); }

template <class F>
void for_each_payload_byte_block(const TrajectorySet& set, F&& sink) {
  char buf[8];
  for (const auto& traj : set) {
    const Field& u = traj.values();
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      for (Eigen::Index j = 0; j < u.cols(); ++j) {
        put_le(std::bit_cast<std::uint64_t>(u(i, j)), buf);
        sink(buf);
      }
  }
}

json header_json(const EqtHeader& h) {
  json j;
  j["magic"] = kMagic;
  j["pde"] = h.pde;
  j["grid"] = {{"x0", h.grid.x0},   {"length", h.grid.length}, {"nx", h.grid.nx},
               {"t_start", h.grid.t_start}, {"t_end", h.grid.t_end}, {"nt", h.grid.nt}};
  j["M"] = h.M;
  j["sigma"] = h.sigma;
  j["seeds"] = h.seeds;
  json meta = json::object();
  for (const auto& [k, v] : h.metadata) meta[k] = v;
  j["metadata"] = meta;
  return j;
}

}  // namespace

std::uint64_t payload_checksum(const TrajectorySet& set) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for_each_payload_byte_block(set, [&](const char* bytes) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<unsigned char>(bytes[b]);
      h *= 0x100000001b3ULL;
    }
  });
  return h;
}

std::string checksum_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_eqt(std::ostream& out, const EqtHeader& header, const TrajectorySet& set) {
  require(header.M == static_cast<int>(set.size()), "eqt: header M does not match the set");
  require(header.grid == set.grid(), "eqt: header grid does not match the set");
  out << header_json(header).dump() << '\n';
  for_each_payload_byte_block(set, [&](const char* bytes) { out.write(bytes, 8); });
  if (!out) io_fail("write failed");
}

void write_eqt(const std::filesystem::path& path, const EqtHeader& header, const TrajectorySet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail("cannot open " + path.string() + " for writing");
  write_eqt(out, header, set);
}

EqtFile read_eqt(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) io_fail("missing header line");
  json j;
  try {
    j = json::parse(line);
  } catch (const std::exception& e) {
    io_fail(std::string("header is not JSON: ") + e.what());
  }
  EqtHeader h;
  try {
    if (j.at("magic").get<std::string>() != kMagic) io_fail("bad magic");
    h.pde = j.at("pde").get<std::string>();
    const auto& g = j.at("grid");
    h.grid = Grid1D{g.at("x0").get<double>(),      g.at("length").get<double>(), g.at("nx").get<int>(),
                    g.at("t_start").get<double>(), g.at("t_end").get<double>(),  g.at("nt").get<int>()};
    h.M = j.at("M").get<int>();
    h.sigma = j.at("sigma").get<double>();
    h.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& [k, v] : j.at("metadata").items()) h.metadata.emplace_back(k, v.get<std::string>());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    io_fail(std::string("malformed header: ") + e.what());
  }
  if (h.M < 1 || h.grid.nx < 1 || h.grid.nt < 1) io_fail("header sizes must be positive");
  try {
    h.grid.validate();
  } catch (const std::exception& e) {
    io_fail(e.what());
  }

  const auto per = static_cast<std::size_t>(h.grid.nt) * static_cast<std::size_t>(h.grid.nx);
  std::vector<unsigned char> block(per * 8);
  std::vector<Trajectory> trajs;
  for (int m = 0; m < h.M; ++m) {
    in.read(reinterpret_cast<char*>(block.data()), static_cast<std::streamsize>(block.size()));
    if (static_cast<std::size_t>(in.gcount()) != block.size())
      io_fail("payload truncated in trajectory " + std::to_string(m));
    Field u(h.grid.nt, h.grid.nx);
    for (std::size_t k = 0; k < per; ++k) u.data()[k] = std::bit_cast<double>(get_le(block.data() + 8 * k));
    try {
      trajs.emplace_back(h.grid, std::move(u));
    } catch (const std::exception& e) {
      io_fail(e.what());
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) io_fail("trailing bytes after payload");
  return EqtFile{std::move(h), TrajectorySet(std::move(trajs))};
}

EqtFile read_eqt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open " + path.string());
  return read_eqt(in);
}

}  // namespace eqod
