#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "eqod/core.hpp"
#include "eqod/spectral.hpp"
#include "eqod/terms.hpp"

namespace eqod {

enum class LibraryProvenance { standard, galilean, galilean_odd, stability_selected, custom };

std::string_view provenance_name(LibraryProvenance p);

/// Ordered, duplicate-free, nonempty list of candidate terms.
class LibrarySpec {
 public:
  LibrarySpec(std::vector<Term> terms, LibraryProvenance provenance);

  const std::vector<Term>& terms() const { return terms_; }
  LibraryProvenance provenance() const { return provenance_; }
  std::size_t size() const { return terms_.size(); }
  const Term& operator[](std::size_t j) const { return terms_[j]; }
  bool contains(const Term& t) const;
  std::optional<std::size_t> index_of(const Term& t) const;
  /// Comma-separated term tags.
  std::string describe() const;

  bool operator==(const LibrarySpec&) const = default;

 private:
  std::vector<Term> terms_;
  LibraryProvenance provenance_;
};

LibrarySpec standard_library();
/// u_x, u_xx, u_xxx, u_xxxx, u*u_x, u*u_xx, u^2*u_x.
LibrarySpec galilean_reduced();
/// Drops u*u_xx and u^2 when present. A galilean spec becomes galilean_odd.
LibrarySpec odd_reflection_prune(const LibrarySpec& spec);
/// The extra products appended (in this order) by expanded_library.
const std::vector<Term>& expansion_terms();
/// Standard library followed by the first size-10 expansion terms.
/// size must be one of 10, 15, 20, 25, 30.
LibrarySpec expanded_library(int size);

/// Spectral derivatives u, u_x, ..., u_xxxx of one trajectory, computed on
/// first use and kept for the lifetime of the cache.
class DerivativeCache {
 public:
  explicit DerivativeCache(const Trajectory& traj);

  const Trajectory& trajectory() const { return traj_; }
  const Field& derivative(int order);
  /// Pointwise product field of `term`.
  Field evaluate(const Term& term);

 private:
  const Trajectory& traj_;
  SpectralWorkspace ws_;
  std::array<std::optional<Field>, kMaxDerivativeOrder + 1> d_;
};

Field evaluate_term(const Trajectory& traj, const Term& term);

}  // namespace eqod
