#include "carnot/field_calculus.hpp"

#include <stdexcept>

namespace carnot {

int rational_rank(std::vector<std::vector<Rational>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  int rank = 0;
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < cols && pivot_row < rows.size(); ++c) {
    std::size_t found = pivot_row;
    while (found < rows.size() && rows[found][c] == 0) ++found;
    if (found == rows.size()) continue;
    std::swap(rows[found], rows[pivot_row]);
    for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
      if (rows[r][c] == 0) continue;
      Rational factor = rows[r][c] / rows[pivot_row][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= factor * rows[pivot_row][k];
    }
    ++pivot_row;
    ++rank;
  }
  return rank;
}

HormanderRank hormander_rank(const std::vector<VectorField>& generators) {
  HormanderRank result;
  if (generators.empty()) return result;
  const std::size_t d = generators.front().dimension();
  std::vector<std::vector<Rational>> span;
  std::vector<VectorField> level = generators;
  for (int depth = 1; depth <= static_cast<int>(d) + 1 && !level.empty(); ++depth) {
    for (const auto& f : level) span.push_back(f.at_origin());
    int rank = rational_rank(span);
    if (rank > result.rank) {
      result.rank = rank;
      result.achieved_step = depth;
    }
    if (rank == static_cast<int>(d)) break;
    std::vector<VectorField> next;
    for (const auto& x : generators) {
      for (const auto& f : level) {
        auto b = bracket(x, f);
        if (!b.is_zero()) next.push_back(std::move(b));
      }
    }
    level = std::move(next);
  }
  return result;
}

HormanderRank hormander_rank(const GroupSpec& g) { return hormander_rank(g.generators()); }

namespace {

bool check_homogeneity(const StrataShape& shape, const SublaplacianSymbol& symbol) {
  const std::size_t d = symbol.dimension();
  const std::size_t total = d + 1;  // extra variable is lambda
  const auto lambda = Polynomial::variable(total, d);
  std::vector<Polynomial> dilated, embed;
  for (std::size_t i = 0; i < d; ++i) {
    embed.push_back(Polynomial::variable(total, i));
    dilated.push_back(embed.back() * lambda.pow(static_cast<unsigned>(shape.weight(i))));
  }
  // Lift the symbol coefficients into the ring with lambda.
  SublaplacianSymbol lifted;
  for (const auto& g : symbol.generators) {
    VectorField f(total);
    for (std::size_t m = 0; m < d; ++m) f.coefficient(m) = g.coefficient(m).substitute(embed);
    lifted.generators.push_back(std::move(f));
  }
  for (const auto& [key, p] : symbol.second) lifted.second[key] = p.substitute(embed);
  for (const auto& [key, p] : symbol.first) lifted.first[key] = p.substitute(embed);

  // Monomial probes up to degree 3.
  std::vector<Exponent> probes;
  Exponent e(d, 0);
  auto recurse = [&](auto&& self, std::size_t var, int budget) -> void {
    if (var == d) {
      probes.push_back(e);
      return;
    }
    for (int k = 0; k <= budget; ++k) {
      e[var] = static_cast<std::uint16_t>(k);
      self(self, var + 1, budget - k);
    }
    e[var] = 0;
  };
  recurse(recurse, 0, 3);

  for (const auto& probe : probes) {
    Polynomial u = Polynomial::monomial(probe, Rational(1));
    Polynomial lhs = apply(lifted, u.substitute(dilated));
    Polynomial lu = apply(symbol, u);
    Polynomial rhs = lu.substitute(dilated) * lambda.pow(2);
    if (!(lhs == rhs)) return false;
  }
  return true;
}

}  // namespace

SublaplacianSymbol sublaplacian(const StrataShape& shape, const std::vector<VectorField>& generators) {
  SublaplacianSymbol symbol;
  symbol.generators = generators;
  if (generators.empty()) return symbol;
  const std::size_t d = generators.front().dimension();
  // X^2 = sum_{m,n} c_m c_n d_m d_n + sum_n X(c_n) d_n, negated.
  for (const auto& x : generators) {
    for (std::size_t m = 0; m < d; ++m) {
      const auto& cm = x.coefficient(m);
      if (cm.is_zero()) continue;
      for (std::size_t n = 0; n < d; ++n) {
        const auto& cn = x.coefficient(n);
        if (cn.is_zero()) continue;
        auto key = std::make_pair(std::min(m, n), std::max(m, n));
        auto it = symbol.second.try_emplace(key, Polynomial(d)).first;
        it->second -= cm * cn;
      }
    }
    for (std::size_t n = 0; n < d; ++n) {
      auto term = apply(x, x.coefficient(n));
      if (term.is_zero()) continue;
      auto it = symbol.first.try_emplace(n, Polynomial(d)).first;
      it->second -= term;
    }
  }
  std::erase_if(symbol.second, [](const auto& kv) { return kv.second.is_zero(); });
  std::erase_if(symbol.first, [](const auto& kv) { return kv.second.is_zero(); });
  symbol.homogeneity_verified = check_homogeneity(shape, symbol);
  return symbol;
}

SublaplacianSymbol sublaplacian(const GroupSpec& g) { return sublaplacian(g.shape(), g.generators()); }

Polynomial apply(const SublaplacianSymbol& symbol, const Polynomial& u) {
  Polynomial result(u.num_vars());
  for (const auto& [key, c] : symbol.second) {
    auto second = u.derivative(key.first).derivative(key.second);
    if (!second.is_zero()) result += c * second;
  }
  for (const auto& [n, c] : symbol.first) {
    auto du = u.derivative(n);
    if (!du.is_zero()) result += c * du;
  }
  return result;
}

Polynomial apply_sum_of_squares(const std::vector<VectorField>& generators, const Polynomial& u) {
  Polynomial result(u.num_vars());
  for (const auto& x : generators) result -= apply(x, apply(x, u));
  return result;
}

std::vector<BracketEntry> bracket_table(const std::vector<VectorField>& fields) {
  std::vector<BracketEntry> table;
  for (std::size_t a = 0; a < fields.size(); ++a) {
    for (std::size_t b = a + 1; b < fields.size(); ++b) table.push_back({a, b, bracket(fields[a], fields[b])});
  }
  return table;
}

std::optional<std::vector<Rational>> express_in_basis(const VectorField& value, const std::vector<VectorField>& basis) {
  // The Jacobian basis is the identity at 0, so the candidate coefficients
  // are the values at the origin; confirm the identity exactly.
  auto coeffs = value.at_origin();
  if (coeffs.size() != basis.size()) throw std::invalid_argument("express_in_basis: basis size mismatch");
  VectorField rebuilt(value.dimension());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (coeffs[k] != 0) rebuilt += coeffs[k] * basis[k];
  }
  if (!(rebuilt == value)) return std::nullopt;
  return coeffs;
}

}  // namespace carnot
