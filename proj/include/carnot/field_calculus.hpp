#pragma once

#include "carnot/group.hpp"
#include "carnot/vector_field.hpp"

#include <map>
#include <utility>
#include <vector>

namespace carnot {

struct HormanderRank {
  int rank = 0;
  /// Bracket depth at which the span stops growing (1 = generators only).
  int achieved_step = 0;
};

/// Span at x = 0 of the iterated brackets of the generators, by exact
/// rational elimination.
HormanderRank hormander_rank(const GroupSpec& g);
HormanderRank hormander_rank(const std::vector<VectorField>& generators);

/// Rank of a set of rational vectors.
int rational_rank(std::vector<std::vector<Rational>> rows);

/// Expanded form of -sum_i X_i^2:
///   sum_{m<=n} second[(m,n)] d_m d_n + sum_m first[m] d_m.
struct SublaplacianSymbol {
  std::vector<VectorField> generators;
  std::map<std::pair<std::size_t, std::size_t>, Polynomial> second;
  std::map<std::size_t, Polynomial> first;
  /// L(u o delta_lambda) = lambda^2 (L u) o delta_lambda held on every
  /// monomial probe of degree <= 3.
  bool homogeneity_verified = false;

  std::size_t dimension() const { return generators.empty() ? 0 : generators.front().dimension(); }
};

SublaplacianSymbol sublaplacian(const GroupSpec& g);
SublaplacianSymbol sublaplacian(const StrataShape& shape, const std::vector<VectorField>& generators);

/// Applies the expanded symbol to a polynomial.
Polynomial apply(const SublaplacianSymbol& symbol, const Polynomial& u);
/// -sum_i X_i(X_i u), computed without the expansion.
Polynomial apply_sum_of_squares(const std::vector<VectorField>& generators, const Polynomial& u);

/// Table of [fields[a], fields[b]] for a < b.
struct BracketEntry {
  std::size_t a = 0;
  std::size_t b = 0;
  VectorField value;
};
std::vector<BracketEntry> bracket_table(const std::vector<VectorField>& fields);

/// Writes `value` as a rational combination of `basis` when it is a constant
/// combination (checked exactly); returns std::nullopt otherwise.
std::optional<std::vector<Rational>> express_in_basis(const VectorField& value, const std::vector<VectorField>& basis);

}  // namespace carnot
