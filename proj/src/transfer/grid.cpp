#include <algorithm>
#include <cmath>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle {

UniformGrid UniformGrid::over(const Interval& hull, std::size_t size) {
  if (size < 2) throw Error(ErrorCode::invalid_argument, "grid needs at least 2 nodes");
  Interval h = hull;
  if (!(h.width() > 1e-12)) h = Interval{hull.mid() - 1e-9, hull.mid() + 1e-9};
  return {h.lo, h.hi, size};
}

double UniformGrid::node(std::size_t i) const {
  if (i + 1 == size) return hi;
  return lo + static_cast<double>(i) * spacing();
}

std::vector<double> UniformGrid::nodes() const {
  std::vector<double> out(size);
  for (std::size_t i = 0; i < size; ++i) out[i] = node(i);
  return out;
}

std::pair<std::size_t, double> UniformGrid::locate(double x) const {
  if (!(x > lo)) return {0, 0.0};
  if (!(x < hi)) return {size - 2, 1.0};
  const double pos = (x - lo) / spacing();
  std::size_t k = std::min(static_cast<std::size_t>(pos), size - 2);
  return {k, std::clamp(pos - static_cast<double>(k), 0.0, 1.0)};
}

GridFunction::GridFunction(UniformGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size) throw Error(ErrorCode::invalid_argument, "grid function size mismatch");
}

GridFunction GridFunction::constant(UniformGrid grid, double value) {
  return GridFunction(grid, std::vector<double>(grid.size, value));
}

GridFunction GridFunction::sample(UniformGrid grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) v[i] = f(grid.node(i));
  return GridFunction(grid, std::move(v));
}

double GridFunction::operator()(double x) const {
  const auto [k, t] = grid_.locate(x);
  return (1.0 - t) * values_[k] + t * values_[k + 1];
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

double GridFunction::lipschitz() const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) m = std::max(m, std::abs(values_[i + 1] - values_[i]));
  return m / grid_.spacing();
}

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  CompensatedSum total;
  for (const Atom& a : atoms_) {
    if (a.mass < 0.0) throw Error(ErrorCode::invalid_argument, "atom masses must be nonnegative");
    total.add(a.mass);
  }
  total_mass_ = total.value();
}

AtomicMeasure AtomicMeasure::uniform(const Interval& hull, std::size_t count) {
  if (count == 0) throw Error(ErrorCode::invalid_argument, "uniform measure needs at least one atom");
  std::vector<Atom> atoms(count);
  for (std::size_t k = 0; k < count; ++k)
    atoms[k] = {hull.lo + (static_cast<double>(k) + 0.5) / static_cast<double>(count) * hull.width(),
                1.0 / static_cast<double>(count)};
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure AtomicMeasure::normalized() const {
  if (!(total_mass_ > 0.0)) throw Error(ErrorCode::invalid_argument, "cannot normalize a zero measure");
  std::vector<Atom> out = atoms_;
  for (Atom& a : out) a.mass /= total_mass_;
  return AtomicMeasure(std::move(out));
}

double AtomicMeasure::integrate(const std::function<double(double)>& f) const {
  CompensatedSum s;
  for (const Atom& a : atoms_) s.add(a.mass * f(a.position));
  return s.value();
}

double AtomicMeasure::integrate(const GridFunction& f) const {
  CompensatedSum s;
  for (const Atom& a : atoms_) s.add(a.mass * f(a.position));
  return s.value();
}

std::vector<double> bin_to_grid(const AtomicMeasure& mu, const UniformGrid& grid) {
  std::vector<double> m(grid.size, 0.0);
  for (const Atom& a : mu.atoms()) {
    const auto [k, t] = grid.locate(a.position);
    m[k] += (1.0 - t) * a.mass;
    m[k + 1] += t * a.mass;
  }
  return m;
}

AtomicMeasure measure_from_nodes(const UniformGrid& grid, std::span<const double> masses) {
  std::vector<Atom> atoms(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) atoms[i] = {grid.node(i), masses[i]};
  return AtomicMeasure(std::move(atoms));
}

}  // namespace ruelle
