#include "carnot/operator.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carnot {

namespace {

using SparseRow = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

CsrMatrix to_csr(const SparseRow& a) {
  CsrMatrix m;
  m.rows = static_cast<std::size_t>(a.rows());
  m.row_ptr.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.rows() + 1);
  const auto nnz = static_cast<std::size_t>(a.nonZeros());
  m.col.resize(nnz);
  m.val.assign(a.valuePtr(), a.valuePtr() + nnz);
  for (std::size_t k = 0; k < nnz; ++k) m.col[k] = static_cast<std::int32_t>(a.innerIndexPtr()[k]);
  return m;
}

SparseRow from_csr(const CsrMatrix& m) {
  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  triplets.reserve(m.val.size());
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (auto k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      triplets.emplace_back(static_cast<std::int64_t>(r), m.col[static_cast<std::size_t>(k)],
                            m.val[static_cast<std::size_t>(k)]);
    }
  }
  SparseRow a(static_cast<std::int64_t>(m.rows), static_cast<std::int64_t>(m.rows));
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

void check_sizes(const Grid& grid, std::span<const double> u, std::span<double> out) {
  if (u.size() != grid.size() || out.size() != grid.size()) {
    throw std::invalid_argument("operator: buffer size does not match the grid");
  }
  if (u.data() == out.data()) throw std::invalid_argument("operator: input and output alias");
}

}  // namespace

void CsrMatrix::multiply(std::span<const double> u, std::span<double> out) const {
  const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (auto k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      acc += val[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(col[static_cast<std::size_t>(k)])];
    }
    out[static_cast<std::size_t>(r)] = acc;
  }
}

void CsrMatrix::multiply_serial(std::span<const double> u, std::span<double> out) const {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (auto k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      acc += val[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(col[static_cast<std::size_t>(k)])];
    }
    out[r] = acc;
  }
}

double CsrMatrix::asymmetry() const {
  SparseRow a = from_csr(*this);
  SparseRow t = a.transpose();
  SparseRow diff = a - t;
  double worst = 0.0;
  for (std::int64_t k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
  return worst;
}

DiscreteField::DiscreteField(const VectorField& field, GridPtr grid, Difference kind)
    : grid_(std::move(grid)), kind_(kind) {
  const auto d = static_cast<std::size_t>(grid_->dimension());
  if (field.dimension() != d) throw std::invalid_argument("discretize: field and grid dimensions differ");
  std::vector<double> bound(grid_->size(), 0.0);
  for (std::size_t m = 0; m < d; ++m) {
    const auto& c = field.coefficient(m);
    if (c.is_zero()) continue;
    Axis axis;
    axis.m = m;
    if (c.is_constant()) {
      axis.value = to_double(c.constant_term());
      for (auto& b : bound) b += std::abs(axis.value);
    } else {
      axis.constant = false;
      if (c.depends_on(m)) transverse_ = false;
      CompiledPolynomial compiled(c);
      axis.values.resize(grid_->size());
      std::vector<double> x(d);
      for (std::size_t p = 0; p < grid_->size(); ++p) {
        grid_->coordinates(p, x);
        axis.values[p] = compiled(x);
        bound[p] += std::abs(axis.values[p]);
      }
    }
    axes_.push_back(std::move(axis));
  }
  coefficient_bound_ = bound.empty() ? 0.0 : *std::max_element(bound.begin(), bound.end());
}

double DiscreteField::point_value(std::span<const double> u, std::size_t p) const {
  const auto& g = *grid_;
  double acc = 0.0;
  for (const auto& axis : axes_) {
    const std::size_t stride = g.stride(axis.m);
    const auto n = static_cast<std::size_t>(g.points(axis.m));
    const std::size_t i = (p / stride) % n;
    const double up = i + 1 < n ? u[p + stride] : 0.0;
    const double down = i > 0 ? u[p - stride] : 0.0;
    const double h = g.spacing(axis.m);
    double diff = 0.0;
    switch (kind_) {
      case Difference::centered:
        diff = (up - down) / (2.0 * h);
        break;
      case Difference::forward:
        diff = (up - u[p]) / h;
        break;
      case Difference::backward:
        diff = (u[p] - down) / h;
        break;
    }
    acc += axis.at(p) * diff;
  }
  return acc;
}

void DiscreteField::apply(std::span<const double> u, std::span<double> out) const {
  check_sizes(*grid_, u, out);
  const auto n = static_cast<std::int64_t>(grid_->size());
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n; ++p) out[static_cast<std::size_t>(p)] = point_value(u, static_cast<std::size_t>(p));
}

void DiscreteField::apply_serial(std::span<const double> u, std::span<double> out) const {
  check_sizes(*grid_, u, out);
  for (std::size_t p = 0; p < grid_->size(); ++p) out[p] = point_value(u, p);
}

GridFunction DiscreteField::apply(const GridFunction& u) const {
  GridFunction out(grid_);
  apply(u.values(), out.values());
  return out;
}

CsrMatrix DiscreteField::matrix() const {
  const auto& g = *grid_;
  std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
  triplets.reserve(g.size() * (axes_.size() * 2 + 1));
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto row = static_cast<std::int64_t>(p);
    for (const auto& axis : axes_) {
      const std::size_t stride = g.stride(axis.m);
      const auto n = static_cast<std::size_t>(g.points(axis.m));
      const std::size_t i = (p / stride) % n;
      const double c = axis.at(p);
      const double h = g.spacing(axis.m);
      const auto up = static_cast<std::int64_t>(p + stride);
      const auto down = static_cast<std::int64_t>(p) - static_cast<std::int64_t>(stride);
      switch (kind_) {
        case Difference::centered:
          if (i + 1 < n) triplets.emplace_back(row, up, c / (2.0 * h));
          if (i > 0) triplets.emplace_back(row, down, -c / (2.0 * h));
          break;
        case Difference::forward:
          if (i + 1 < n) triplets.emplace_back(row, up, c / h);
          triplets.emplace_back(row, row, -c / h);
          break;
        case Difference::backward:
          triplets.emplace_back(row, row, c / h);
          if (i > 0) triplets.emplace_back(row, down, -c / h);
          break;
      }
    }
  }
  const auto size = static_cast<std::int64_t>(g.size());
  SparseRow a(size, size);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.prune(0.0);
  return to_csr(a);
}

DiscreteSublaplacian::DiscreteSublaplacian(const std::vector<VectorField>& generators, GridPtr grid)
    : grid_(std::move(grid)) {
  if (generators.empty()) throw std::invalid_argument("sublaplacian: no generators");
  std::vector<double> bound(grid_->size(), 0.0);
  for (const auto& x : generators) {
    forward_.emplace_back(x, grid_, Difference::forward);
    backward_.emplace_back(x, grid_, Difference::backward);
    symmetric_ = symmetric_ && forward_.back().transverse();
  }
  // A uses the pointwise sum over all generators before taking the max.
  const auto d = static_cast<std::size_t>(grid_->dimension());
  std::vector<CompiledPolynomial> coefficients;
  for (const auto& x : generators) {
    for (std::size_t m = 0; m < d; ++m) {
      if (!x.coefficient(m).is_zero()) coefficients.emplace_back(x.coefficient(m));
    }
  }
  std::vector<double> point(d);
  double worst = 0.0;
  for (std::size_t p = 0; p < grid_->size(); ++p) {
    grid_->coordinates(p, point);
    double sum = 0.0;
    for (const auto& c : coefficients) sum += std::abs(c(point));
    worst = std::max(worst, sum);
  }
  cfl_constant_ = worst * worst;

  const auto size = static_cast<std::int64_t>(grid_->size());
  SparseRow total(size, size);
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    SparseRow plus = from_csr(forward_[i].matrix());
    SparseRow minus = from_csr(backward_[i].matrix());
    SparseRow pm = plus * minus;
    SparseRow mp = minus * plus;
    total += pm + mp;
  }
  total *= -0.5;
  total.prune(0.0);
  matrix_ = to_csr(total);
}

DiscreteSublaplacian::DiscreteSublaplacian(const GroupSpec& g, GridPtr grid)
    : DiscreteSublaplacian(g.generators(), std::move(grid)) {
  if (!(g.shape() == grid_->shape())) throw std::invalid_argument("sublaplacian: grid shape differs from the group");
}

void DiscreteSublaplacian::apply(std::span<const double> u, std::span<double> out) const {
  check_sizes(*grid_, u, out);
  matrix_.multiply(u, out);
}

GridFunction DiscreteSublaplacian::apply(const GridFunction& u) const {
  GridFunction out(grid_);
  apply(u.values(), out.values());
  return out;
}

void DiscreteSublaplacian::apply_composed(std::span<const double> u, std::span<double> out) const {
  check_sizes(*grid_, u, out);
  const auto n = static_cast<std::int64_t>(grid_->size());
  std::vector<double> first(grid_->size()), second(grid_->size());
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n; ++p) out[static_cast<std::size_t>(p)] = 0.0;
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    backward_[i].apply(u, first);
    forward_[i].apply(first, second);
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < n; ++p) out[static_cast<std::size_t>(p)] -= 0.5 * second[static_cast<std::size_t>(p)];
    forward_[i].apply(u, first);
    backward_[i].apply(first, second);
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < n; ++p) out[static_cast<std::size_t>(p)] -= 0.5 * second[static_cast<std::size_t>(p)];
  }
}

void DiscreteSublaplacian::apply_serial(std::span<const double> u, std::span<double> out) const {
  check_sizes(*grid_, u, out);
  std::vector<double> first(grid_->size()), second(grid_->size());
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    backward_[i].apply_serial(u, first);
    forward_[i].apply_serial(first, second);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] -= 0.5 * second[p];
    forward_[i].apply_serial(u, first);
    backward_[i].apply_serial(first, second);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] -= 0.5 * second[p];
  }
}

double DiscreteSublaplacian::time_step(double safety) const {
  if (!(safety > 0.0)) throw std::invalid_argument("time step safety factor must be positive");
  const double h = grid_->min_spacing();
  return safety * h * h / std::max(cfl_constant_, 1e-300);
}

DiscreteField discretize(const VectorField& field, GridPtr grid) { return DiscreteField(field, std::move(grid)); }

DiscreteSublaplacian discretize(const SublaplacianSymbol& symbol, GridPtr grid) {
  return DiscreteSublaplacian(symbol.generators, std::move(grid));
}

}  // namespace carnot
