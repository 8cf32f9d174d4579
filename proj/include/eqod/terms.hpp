#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eqod {

/// Highest spatial derivative order a library term may reference.
inline constexpr int kMaxDerivativeOrder = 4;

/// A candidate operator written as a monomial in u and its spatial
/// derivatives: prod_k (d^k u / dx^k)^exponents[k].
///
/// The ten terms of the standard library are the monomials returned by
/// standard_terms(); the expanded libraries used for scaling experiments add
/// further products, which is why the representation is general.
class Term {
 public:
  using Exponents = std::array<std::uint8_t, kMaxDerivativeOrder + 1>;

  constexpr Term() = default;
  explicit constexpr Term(Exponents e) : exponents_(e) {}

  static constexpr Term u(int power = 1) {
    Exponents e{};
    e[0] = static_cast<std::uint8_t>(power);
    return Term(e);
  }
  static constexpr Term derivative(int order) {
    Exponents e{};
    e[static_cast<std::size_t>(order)] = 1;
    return Term(e);
  }

  constexpr Term times(const Term& other) const {
    Exponents e = exponents_;
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = static_cast<std::uint8_t>(e[k] + other.exponents_[k]);
    return Term(e);
  }

  constexpr const Exponents& exponents() const { return exponents_; }

  /// Highest derivative present (0 for pure powers of u).
  constexpr int derivative_order() const {
    for (int k = kMaxDerivativeOrder; k > 0; --k)
      if (exponents_[static_cast<std::size_t>(k)] != 0) return k;
    return 0;
  }

  /// Total polynomial degree in (u, u_x, ...).
  constexpr int power() const {
    int p = 0;
    for (auto e : exponents_) p += e;
    return p;
  }

  /// ASCII tag, e.g. "u^2*u_x", "u_x^2", "u*u_xx".
  std::string name() const;

  /// Inverse of name(); returns nullopt for malformed tags.
  static std::optional<Term> parse(std::string_view tag);

  constexpr auto operator<=>(const Term&) const = default;

 private:
  Exponents exponents_{};
};

namespace terms {
inline constexpr Term u = Term::u(1);
inline constexpr Term u2 = Term::u(2);
inline constexpr Term u3 = Term::u(3);
inline constexpr Term u_x = Term::derivative(1);
inline constexpr Term u_xx = Term::derivative(2);
inline constexpr Term u_xxx = Term::derivative(3);
inline constexpr Term u_xxxx = Term::derivative(4);
inline constexpr Term u_u_x = Term::u(1).times(Term::derivative(1));
inline constexpr Term u_u_xx = Term::u(1).times(Term::derivative(2));
inline constexpr Term u2_u_x = Term::u(2).times(Term::derivative(1));
}  // namespace terms

/// The ten standard candidate operators in canonical order:
/// u, u^2, u^3, u_x, u_xx, u_xxx, u_xxxx, u*u_x, u*u_xx, u^2*u_x.
const std::vector<Term>& standard_terms();

/// Position of `t` in standard_terms(), or nullopt.
std::optional<std::size_t> standard_index(const Term& t);

}  // namespace eqod
