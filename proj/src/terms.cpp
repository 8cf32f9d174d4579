#include "eqod/terms.hpp"

#include <algorithm>
#include <charconv>

namespace eqod {

namespace {

std::string factor_name(int order) {
  if (order == 0) return "u";
  return "u_" + std::string(static_cast<std::size_t>(order), 'x');
}

}  // namespace

std::string Term::name() const {
  std::string out;
  for (int k = 0; k <= kMaxDerivativeOrder; ++k) {
    const int e = exponents_[static_cast<std::size_t>(k)];
    if (e == 0) continue;
    if (!out.empty()) out += '*';
    out += factor_name(k);
    if (e > 1) out += '^' + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

std::optional<Term> Term::parse(std::string_view tag) {
  Exponents e{};
  bool any = false;
  while (!tag.empty()) {
    const auto star = tag.find('*');
    std::string_view factor = tag.substr(0, star);
    tag = star == std::string_view::npos ? std::string_view{} : tag.substr(star + 1);
    if (star != std::string_view::npos && tag.empty()) return std::nullopt;

    int power = 1;
    if (const auto caret = factor.find('^'); caret != std::string_view::npos) {
      const auto digits = factor.substr(caret + 1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), power);
      if (ec != std::errc{} || ptr != digits.data() + digits.size() || power < 1 || power > 9)
        return std::nullopt;
      factor = factor.substr(0, caret);
    }
    if (factor.empty() || factor[0] != 'u') return std::nullopt;
    int order = 0;
    if (factor.size() > 1) {
      if (factor[1] != '_') return std::nullopt;
      const auto xs = factor.substr(2);
      if (xs.empty() || !std::all_of(xs.begin(), xs.end(), [](char c) { return c == 'x'; }))
        return std::nullopt;
      order = static_cast<int>(xs.size());
    }
    if (order > kMaxDerivativeOrder) return std::nullopt;
    auto& slot = e[static_cast<std::size_t>(order)];
    if (slot + power > 255) return std::nullopt;
    slot = static_cast<std::uint8_t>(slot + power);
    any = true;
  }
  if (!any) return std::nullopt;
  return Term(e);
}

const std::vector<Term>& standard_terms() {
  static const std::vector<Term> kTerms = {
      terms::u,      terms::u2,     terms::u3,     terms::u_x,    terms::u_xx,
      terms::u_xxx,  terms::u_xxxx, terms::u_u_x,  terms::u_u_xx, terms::u2_u_x,
  };
  return kTerms;
}

std::optional<std::size_t> standard_index(const Term& t) {
  const auto& all = standard_terms();
  const auto it = std::find(all.begin(), all.end(), t);
  if (it == all.end()) return std::nullopt;
  return static_cast<std::size_t>(it - all.begin());
}

}  // namespace eqod
