#include "eqod/oplib.hpp"

#include <algorithm>
#include <set>

#include "eqod/error.hpp"
#include "eqod/kernels.hpp"

namespace eqod {

std::string_view provenance_name(LibraryProvenance p) {
  switch (p) {
    case LibraryProvenance::standard: return "standard";
    case LibraryProvenance::galilean: return "galilean";
    case LibraryProvenance::galilean_odd: return "galilean_odd";
    case LibraryProvenance::stability_selected: return "stability_selected";
    case LibraryProvenance::custom: return "custom";
  }
  return "custom";
}

LibrarySpec::LibrarySpec(std::vector<Term> terms, LibraryProvenance provenance)
    : terms_(std::move(terms)), provenance_(provenance) {
  require(!terms_.empty(), "library spec must be nonempty");
  std::set<Term> seen;
  for (const auto& t : terms_) require(seen.insert(t).second, "library spec has duplicate term " + t.name());
}

bool LibrarySpec::contains(const Term& t) const { return index_of(t).has_value(); }

std::optional<std::size_t> LibrarySpec::index_of(const Term& t) const {
  const auto it = std::find(terms_.begin(), terms_.end(), t);
  if (it == terms_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - terms_.begin());
}

std::string LibrarySpec::describe() const {
  std::string s;
  for (const auto& t : terms_) {
    if (!s.empty()) s += ", ";
    s += t.name();
  }
  return s;
}

LibrarySpec standard_library() { return {standard_terms(), LibraryProvenance::standard}; }

LibrarySpec galilean_reduced() {
  using namespace terms;
  return {{u_x, u_xx, u_xxx, u_xxxx, u_u_x, u_u_xx, u2_u_x}, LibraryProvenance::galilean};
}

LibrarySpec odd_reflection_prune(const LibrarySpec& spec) {
  std::vector<Term> kept;
  for (const auto& t : spec.terms())
    if (t != terms::u_u_xx && t != terms::u2) kept.push_back(t);
  auto prov = spec.provenance();
  if (prov == LibraryProvenance::galilean) prov = LibraryProvenance::galilean_odd;
  else if (prov == LibraryProvenance::standard) prov = LibraryProvenance::custom;
  return {std::move(kept), prov};
}

const std::vector<Term>& expansion_terms() {
  static const std::vector<Term> kExtra = [] {
    const Term u = Term::u(1);
    const Term ux = Term::derivative(1), uxx = Term::derivative(2), uxxx = Term::derivative(3),
               uxxxx = Term::derivative(4);
    return std::vector<Term>{
        Term::u(4),           u.times(uxxx),          u.times(uxxxx),       Term::u(2).times(uxx),
        Term::u(3).times(ux), ux.times(ux),           ux.times(uxx),        ux.times(uxxx),
        uxx.times(uxx),       Term::u(2).times(uxxx), Term::u(3).times(uxx), Term::u(5),
        ux.times(ux).times(ux), u.times(ux).times(uxx), Term::u(2).times(ux).times(ux),
        uxx.times(uxxx),      Term::u(4).times(ux),   ux.times(uxxxx),      Term::u(3).times(uxxx),
        u.times(uxx).times(uxx)};
  }();
  return kExtra;
}

LibrarySpec expanded_library(int size) {
  require(size == 10 || size == 15 || size == 20 || size == 25 || size == 30,
          "expanded library size must be one of 10, 15, 20, 25, 30 (got " + std::to_string(size) + ")");
  std::vector<Term> t = standard_terms();
  const auto& extra = expansion_terms();
  t.insert(t.end(), extra.begin(), extra.begin() + (size - 10));
  return {std::move(t), size == 10 ? LibraryProvenance::standard : LibraryProvenance::custom};
}

DerivativeCache::DerivativeCache(const Trajectory& traj)
    : traj_(traj), ws_(traj.grid().nx, traj.grid().length) {}

const Field& DerivativeCache::derivative(int order) {
  require(order >= 0 && order <= kMaxDerivativeOrder, "derivative order out of range");
  if (order == 0) return traj_.values();
  auto& slot = d_[static_cast<std::size_t>(order)];
  if (!slot) slot = ws_.derivative(traj_.values(), order);
  return *slot;
}

Field DerivativeCache::evaluate(const Term& term) {
  const auto& e = term.exponents();
  Field out;
  bool first = true;
  const auto n = static_cast<std::size_t>(traj_.values().size());
  const auto& k = kernels::active();
  for (int order = 0; order <= kMaxDerivativeOrder; ++order) {
    for (int p = 0; p < e[static_cast<std::size_t>(order)]; ++p) {
      const Field& f = derivative(order);
      if (first) {
        out = f;
        first = false;
      } else {
        k.mul(out.data(), f.data(), out.data(), n);
      }
    }
  }
  if (first) out = Field::Ones(traj_.values().rows(), traj_.values().cols());
  return out;
}

Field evaluate_term(const Trajectory& traj, const Term& term) { return DerivativeCache(traj).evaluate(term); }

}  // namespace eqod
