#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "eqod/core.hpp"

namespace eqod {

/// On-disk trajectory set: one UTF-8 JSON header line, then M blocks of
/// nt*nx little-endian doubles, time-major.
struct EqtHeader {
  std::string pde;
  Grid1D grid;
  int M = 0;
  double sigma = 0.0;
  std::vector<std::uint64_t> seeds;
  /// Free-form key/value pairs written under "metadata", in order.
  std::vector<std::pair<std::string, std::string>> metadata;
};

struct EqtFile {
  EqtHeader header;
  TrajectorySet data;
};

/// FNV-1a 64 over the payload bytes exactly as stored.
std::uint64_t payload_checksum(const TrajectorySet& set);
std::string checksum_hex(std::uint64_t h);

void write_eqt(std::ostream& out, const EqtHeader& header, const TrajectorySet& set);
void write_eqt(const std::filesystem::path& path, const EqtHeader& header, const TrajectorySet& set);

/// Throws eqod::Error(ErrorKind::io) on a malformed header, a size mismatch
/// or trailing bytes.
EqtFile read_eqt(std::istream& in);
EqtFile read_eqt(const std::filesystem::path& path);

}  // namespace eqod
