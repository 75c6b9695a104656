#include "carnot/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace carnot {

Grid::Grid(StrataShape shape, std::vector<double> half_widths, std::vector<int> points, std::size_t max_points)
    : shape_(std::move(shape)), half_widths_(std::move(half_widths)), points_(std::move(points)) {
  const auto d = static_cast<std::size_t>(shape_.dimension());
  if (half_widths_.size() != d || points_.size() != d) {
    throw std::invalid_argument("grid: need one half-width and one point count per coordinate");
  }
  size_ = 1;
  for (std::size_t m = 0; m < d; ++m) {
    if (points_[m] < 5 || points_[m] % 2 == 0) {
      throw std::invalid_argument("grid: point count per axis must be odd and >= 5 (got " +
                                  std::to_string(points_[m]) + ")");
    }
    if (!(half_widths_[m] > 0.0) || !std::isfinite(half_widths_[m])) {
      throw std::invalid_argument("grid: half-widths must be positive");
    }
    spacing_.push_back(2.0 * half_widths_[m] / (points_[m] - 1));
    cell_volume_ *= spacing_.back();
    if (size_ > max_points / static_cast<std::size_t>(points_[m])) {
      throw std::length_error("grid: point count exceeds the memory budget of " + std::to_string(max_points) +
                              " points");
    }
    size_ *= static_cast<std::size_t>(points_[m]);
  }
  strides_.assign(d, 1);
  for (std::size_t m = d; m-- > 1;) strides_[m - 1] = strides_[m] * static_cast<std::size_t>(points_[m]);
}

GridPtr Grid::uniform(const StrataShape& shape, double half_width, int points, std::size_t max_points) {
  const auto d = static_cast<std::size_t>(shape.dimension());
  return std::make_shared<const Grid>(shape, std::vector<double>(d, half_width), std::vector<int>(d, points),
                                      max_points);
}

double Grid::min_spacing() const { return *std::min_element(spacing_.begin(), spacing_.end()); }

std::size_t Grid::center() const {
  std::size_t flat = 0;
  for (std::size_t m = 0; m < points_.size(); ++m) flat += static_cast<std::size_t>(points_[m] / 2) * strides_[m];
  return flat;
}

void Grid::multi_index(std::size_t flat, std::span<int> out) const {
  for (std::size_t m = 0; m < points_.size(); ++m) {
    out[m] = static_cast<int>(flat / strides_[m]);
    flat %= strides_[m];
  }
}

std::size_t Grid::flat_index(std::span<const int> index) const {
  std::size_t flat = 0;
  for (std::size_t m = 0; m < points_.size(); ++m) flat += static_cast<std::size_t>(index[m]) * strides_[m];
  return flat;
}

void Grid::coordinates(std::size_t flat, std::span<double> out) const {
  for (std::size_t m = 0; m < points_.size(); ++m) {
    const auto i = static_cast<int>(flat / strides_[m]);
    flat %= strides_[m];
    out[m] = coordinate(m, i);
  }
}

std::vector<double> Grid::coordinates(std::size_t flat) const {
  std::vector<double> x(points_.size());
  coordinates(flat, x);
  return x;
}

double Grid::inscribed_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < points_.size(); ++m) {
    r = std::min(r, std::pow(half_widths_[m], 1.0 / shape_.weight(m)));
  }
  return r;
}

std::string Grid::axes_text() const {
  std::string s;
  for (std::size_t m = 0; m < points_.size(); ++m) s += (m ? "x" : "") + std::to_string(points_[m]);
  return s;
}

std::string Grid::spacing_text() const {
  std::string s;
  for (std::size_t m = 0; m < spacing_.size(); ++m) s += (m ? "x" : "") + format_double(spacing_[m]);
  return s;
}

GridFunction::GridFunction(GridPtr grid, double fill) : grid_(std::move(grid)), values_(grid_->size(), fill) {}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw std::invalid_argument("grid function: value count mismatch");
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(std::span<const double>)>& f) {
  GridFunction u(grid);
  std::vector<double> x(static_cast<std::size_t>(grid->dimension()));
  for (std::size_t p = 0; p < grid->size(); ++p) {
    grid->coordinates(p, x);
    u.values_[p] = f(x);
  }
  return u;
}

GridFunction GridFunction::delta(GridPtr grid) {
  GridFunction u(grid);
  u.values_[grid->center()] = 1.0 / grid->cell_volume();
  return u;
}

void GridFunction::check_compatible(const GridFunction& other) const {
  if (grid_ != other.grid_ && (values_.size() != other.values_.size())) {
    throw std::invalid_argument("grid functions live on different grids");
  }
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (auto& v : values_) v *= c;
  return *this;
}

void GridFunction::axpy(double c, const GridFunction& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += c * other.values_[i];
}

bool GridFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

double lp_norm(const GridFunction& u, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_norm: p must be positive");
  if (std::isinf(p)) return u.max_abs();
  const auto values = u.values();
  // Scale by the maximum so large p neither overflows nor underflows.
  const double scale = u.max_abs();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  if (p == 2.0) {
    for (double v : values) sum += (v / scale) * (v / scale);
  } else if (p == 1.0) {
    for (double v : values) sum += std::abs(v) / scale;
  } else {
    for (double v : values) sum += std::pow(std::abs(v) / scale, p);
  }
  return scale * std::pow(sum * u.grid().cell_volume(), 1.0 / p);
}

double integral(const GridFunction& u) {
  double sum = 0.0;
  for (double v : u.values()) sum += v;
  return sum * u.grid().cell_volume();
}

double shell_integral(const GridFunction& u, double margin) {
  const auto& grid = u.grid();
  std::vector<int> idx(static_cast<std::size_t>(grid.dimension()));
  double sum = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.multi_index(p, idx);
    bool in_shell = false;
    for (std::size_t m = 0; m < idx.size() && !in_shell; ++m) {
      in_shell = std::abs(grid.coordinate(m, idx[m])) > (1.0 - margin) * grid.half_width(m);
    }
    if (in_shell) sum += u[p];
  }
  return sum * grid.cell_volume();
}

double interpolate(const GridFunction& u, std::span<const double> x) {
  const auto& grid = u.grid();
  const auto d = static_cast<std::size_t>(grid.dimension());
  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (std::size_t m = 0; m < d; ++m) {
    const double s = (x[m] + grid.half_width(m)) / grid.spacing(m);
    if (s < -1e-12 || s > grid.points(m) - 1 + 1e-12) return 0.0;
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, grid.points(m) - 2);
    base[m] = i;
    frac[m] = std::clamp(s - i, 0.0, 1.0);
  }
  double value = 0.0;
  const std::size_t corners = std::size_t{1} << d;
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t m = 0; m < d; ++m) {
      const bool up = (c >> m) & 1U;
      w *= up ? frac[m] : 1.0 - frac[m];
      flat += static_cast<std::size_t>(base[m] + (up ? 1 : 0)) * grid.stride(m);
    }
    if (w != 0.0) value += w * u[flat];
  }
  return value;
}

std::vector<double> grid_hom_norms(const Grid& grid) {
  std::vector<double> norms(grid.size());
  std::vector<double> x(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.coordinates(p, x);
    norms[p] = hom_norm(grid.shape(), x);
  }
  return norms;
}

std::string format_double(double v) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, end);
}

void write_csv(std::ostream& out, const GridFunction& u, const std::string& group_name) {
  const auto& grid = u.grid();
  const auto d = static_cast<std::size_t>(grid.dimension());
  out << "# group,N,axes,h\n";
  out << "# " << group_name << ',' << grid.shape().homogeneous_dimension() << ',' << grid.axes_text() << ','
      << grid.spacing_text() << '\n';
  std::vector<int> idx(d);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    grid.multi_index(p, idx);
    for (std::size_t m = 0; m < d; ++m) out << idx[m] << ',';
    for (std::size_t m = 0; m < d; ++m) out << format_double(grid.coordinate(m, idx[m])) << ',';
    out << format_double(u[p]) << '\n';
  }
}

}  // namespace carnot
