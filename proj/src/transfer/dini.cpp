#include <algorithm>
#include <cmath>

#include "ruelle/transfer.hpp"

namespace ruelle {
namespace {

// alpha(t) ~ max_{j, |x-y| <= t} |log p_j(x) - log p_j(y)| over sampled points.
DiniModulus sampled_modulus(const Potential& potential, const IFSFamily& family, std::size_t sample_maps) {
  constexpr std::size_t points = 257;
  const Interval X = family.domain();
  const std::size_t n = family.effective_truncation(sample_maps);
  std::vector<std::vector<double>> logs(n, std::vector<double>(points));
  for (std::size_t j = 1; j <= n; ++j) {
    const ConformalMap sj = family.map_at(j);
    for (std::size_t k = 0; k < points; ++k) {
      const double y = X.lo + X.width() * static_cast<double>(k) / (points - 1);
      logs[j - 1][k] = std::log(potential.value(sj, j, y));
    }
  }
  const double h = X.width() / (points - 1);
  auto alpha = [logs, h](double t) {
    const std::size_t span = std::min<std::size_t>(static_cast<std::size_t>(t / h), points - 1);
    double worst = 0.0;
    for (const auto& row : logs)
      for (std::size_t k = 0; k < points; ++k)
        for (std::size_t d = 1; d <= span && k + d < points; ++d) worst = std::max(worst, std::abs(row[k + d] - row[k]));
    return worst;
  };
  const double lip = alpha(h) / h;
  return {alpha, lip};
}

}  // namespace

std::vector<DiniRow> dini_diagnostics(const Potential& potential, const IFSFamily& family,
                                      std::span<const double> t_grid, std::size_t sample_maps) {
  DiniModulus modulus;
  if (potential.kind() == Potential::Kind::geometric && family.dini()) {
    const DiniModulus base = *family.dini();
    const double s = std::abs(potential.exponent());
    modulus = {[base, s](double t) { return s * base.alpha(t); }, s * base.lipschitz};
  } else if (potential.modulus()) {
    modulus = *potential.modulus();
  } else {
    modulus = sampled_modulus(potential, family, sample_maps);
  }
  std::vector<DiniRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    DiniRow r;
    r.t = t;
    r.alpha = modulus.alpha(t);
    r.phi = phi_bound(modulus, family.contraction(), t);
    r.divergent = !std::isfinite(r.phi);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ruelle
