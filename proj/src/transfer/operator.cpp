#include <algorithm>
#include <cmath>
#include <sstream>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle {
namespace {

struct RawEntry {
  std::uint32_t col;
  double weight;
};

// int_a^b u^q du
double power_integral(double q, double a, double b) {
  if (std::abs(q + 1.0) < 1e-12) return std::log(b / a);
  return (std::pow(b, q + 1.0) - std::pow(a, q + 1.0)) / (q + 1.0);
}

// Entries of int_0^{u0} u^p f(u) du for the piecewise-linear interpolant f on the grid.
void append_tail_integral(const UniformGrid& grid, double p, double u0, std::vector<RawEntry>& row) {
  const double h = grid.spacing();
  for (std::size_t k = 0; k + 1 < grid.size; ++k) {
    const double xk = grid.node(k);
    const double xk1 = grid.node(k + 1);
    if (xk >= u0) break;
    const double a = std::max(xk, 0.0);
    const double b = std::min(xk1, u0);
    if (!(b > a)) continue;
    const double ip = power_integral(p, a, b);
    const double ip1 = power_integral(p + 1.0, a, b);
    row.push_back({static_cast<std::uint32_t>(k), (xk1 * ip - ip1) / h});
    row.push_back({static_cast<std::uint32_t>(k + 1), (ip1 - xk * ip) / h});
  }
}

}  // namespace

DiscreteOperator::DiscreteOperator(const IFSFamily& family, const Potential& potential, UniformGrid grid,
                                   OperatorOptions options)
    : grid_(grid),
      truncation_(family.effective_truncation(options.truncation)),
      tail_sup_(potential.tail_sup(family, options.truncation)),
      tail_model_(options.tail_model),
      workers_(options.workers) {
  if (!std::isfinite(tail_sup_)) {
    std::ostringstream os;
    os << "tail sum_{j>" << truncation_ << "} sup p_j diverges";
    if (potential.kind() == Potential::Kind::geometric) os << " at exponent " << potential.exponent();
    throw Error(ErrorCode::summability, os.str());
  }
  const std::vector<ConformalMap> maps = family.maps(truncation_);

  double tail_digit = 0.0;
  double tail_power = 0.0;
  const bool closure = tail_model_ == TailModel::integral && tail_sup_ > 0.0;
  if (tail_model_ == TailModel::integral) {
    if (family.kind() != FamilyKind::gauss_digit_set || family.finite() || potential.kind() != Potential::Kind::geometric)
      throw Error(ErrorCode::invalid_argument,
                  "integral tail model needs an infinite Gauss digit family with a geometric potential");
    if (grid_.lo > 1e-12) throw Error(ErrorCode::invalid_argument, "integral tail model needs the grid to start at 0");
    tail_digit = family.map_at(truncation_ + 1).mobius_coeffs()->d;
    tail_power = 2.0 * potential.exponent() - 2.0;
  }

  std::vector<std::vector<Entry>> rows(grid_.size);
  parallel_for(grid_.size, workers_, [&](std::size_t i) {
    const double x = grid_.node(i);
    std::vector<RawEntry> raw;
    raw.reserve(2 * truncation_ + 8);
    for (std::size_t j = 1; j <= truncation_; ++j) {
      const ConformalMap& sj = maps[j - 1];
      const double w = potential.weight(sj, j, x);
      const auto [k, t] = grid_.locate(sj(x));
      raw.push_back({static_cast<std::uint32_t>(k), w * (1.0 - t)});
      raw.push_back({static_cast<std::uint32_t>(k + 1), w * t});
    }
    if (closure) append_tail_integral(grid_, tail_power, 1.0 / (tail_digit - 0.5 + x), raw);
    std::stable_sort(raw.begin(), raw.end(), [](const RawEntry& a, const RawEntry& b) { return a.col < b.col; });
    std::vector<Entry>& row = rows[i];
    for (const RawEntry& e : raw) {
      if (!row.empty() && row.back().col == e.col)
        row.back().weight += e.weight;
      else
        row.push_back({e.col, e.weight});
    }
  });

  row_start_.assign(grid_.size + 1, 0);
  for (std::size_t i = 0; i < grid_.size; ++i) row_start_[i + 1] = row_start_[i] + rows[i].size();
  entries_.reserve(row_start_.back());
  for (auto& row : rows) entries_.insert(entries_.end(), row.begin(), row.end());
}

std::vector<double> DiscreteOperator::apply(std::span<const double> f) const {
  if (f.size() != grid_.size) throw Error(ErrorCode::invalid_argument, "operator applied to a vector of wrong size");
  std::vector<double> out(grid_.size, 0.0);
  parallel_for(grid_.size, workers_, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t e = row_start_[i]; e < row_start_[i + 1]; ++e) acc += entries_[e].weight * f[entries_[e].col];
    out[i] = acc;
  });
  return out;
}

std::vector<double> DiscreteOperator::apply_transpose(std::span<const double> masses) const {
  if (masses.size() != grid_.size) throw Error(ErrorCode::invalid_argument, "dual applied to a vector of wrong size");
  std::vector<double> out(grid_.size, 0.0);
  for (std::size_t i = 0; i < grid_.size; ++i) {
    const double m = masses[i];
    if (m == 0.0) continue;
    for (std::size_t e = row_start_[i]; e < row_start_[i + 1]; ++e) out[entries_[e].col] += entries_[e].weight * m;
  }
  return out;
}

ApplyResult apply(const IFSFamily& family, const Potential& potential, const GridFunction& f, std::size_t truncation,
                  TailModel tail_model) {
  const DiscreteOperator op(family, potential, f.grid(), {truncation, tail_model, 1});
  GridFunction out(f.grid(), op.apply(f.values()));
  return {std::move(out), op.tail_sup() * f.max_abs()};
}

AtomicMeasure dual_apply(const IFSFamily& family, const Potential& potential, const AtomicMeasure& mu,
                         std::size_t truncation) {
  const std::size_t n = family.effective_truncation(truncation);
  const std::vector<ConformalMap> maps = family.maps(n);
  std::vector<Atom> out;
  out.reserve(mu.atoms().size() * n);
  for (const Atom& a : mu.atoms()) {
    for (std::size_t j = 1; j <= n; ++j) {
      const ConformalMap& sj = maps[j - 1];
      out.push_back({sj(a.position), a.mass * potential.weight(sj, j, a.position)});
    }
  }
  return AtomicMeasure(std::move(out));
}

}  // namespace ruelle
