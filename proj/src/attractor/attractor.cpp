#include "ruelle/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"

namespace ruelle {
namespace {

std::mt19937_64 point_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

PointCloud chaos_game(const IFSFamily& family, std::size_t truncation, const ChaosOptions& options) {
  if (options.count == 0) throw Error(ErrorCode::invalid_argument, "point count must be positive");
  const std::vector<ConformalMap> maps = family.maps(truncation);
  const std::size_t n = maps.size();

  PointCloud cloud;
  cloud.word_length = options.word_length;
  cloud.truncation = n;
  cloud.seed = options.seed;
  cloud.weights.resize(n, 1.0);
  if (options.weight_exponent) {
    for (std::size_t j = 0; j < n; ++j) cloud.weights[j] = std::pow(maps[j].r_inf(), *options.weight_exponent);
  }
  CompensatedSum total;
  for (double w : cloud.weights) total.add(w);
  if (!(total.value() > 0.0)) throw Error(ErrorCode::invalid_argument, "symbol weights sum to zero");
  for (double& w : cloud.weights) w /= total.value();
  std::vector<double> cumulative(n);
  std::partial_sum(cloud.weights.begin(), cloud.weights.end(), cumulative.begin());

  const double s = std::min(family.contraction(), 1.0);
  cloud.error_radius = std::pow(s, static_cast<double>(options.word_length)) * family.domain().width();
  if (cloud.error_radius > options.accuracy) {
    std::ostringstream os;
    os << "word length " << options.word_length << " only guarantees distance " << cloud.error_radius
       << " to the limit set (requested " << options.accuracy << ")";
    cloud.warnings.push_back(os.str());
  }

  const double base = family.domain().mid();
  cloud.points.resize(options.count);
  parallel_for(options.count, options.workers, [&](std::size_t i) {
    std::mt19937_64 rng = point_stream(options.seed, i);
    double x = base;
    for (std::size_t t = 0; t < options.word_length; ++t) {
      const double u = unit_draw(rng) * cumulative.back();
      std::size_t j = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                               cumulative.begin());
      x = maps[std::min(j, n - 1)](x);
    }
    cloud.points[i] = x;
  });
  return cloud;
}

CylinderCover cylinder_cover(const IFSFamily& family, std::size_t truncation, const CoverPolicy& policy,
                             std::size_t budget, unsigned workers) {
  CylinderCover cover;
  cover.policy = policy;
  cover.base = family.domain();
  const std::vector<ConformalMap> maps = family.maps(truncation);
  const std::size_t n = maps.size();
  cover.truncation = n;
  cover.uncovered_tail = family.tail_sup(1.0, n) * family.domain().width();

  std::size_t fixed = 0;
  double threshold = 0.0;
  std::size_t max_depth = 0;
  if (const auto* f = std::get_if<FixedDepth>(&policy)) {
    if (f->depth == 0) throw Error(ErrorCode::invalid_argument, "cover depth must be at least 1");
    fixed = f->depth;
  } else {
    const auto& t = std::get<DiameterThreshold>(policy);
    if (!(t.threshold > 0.0)) throw Error(ErrorCode::invalid_argument, "diameter threshold must be positive");
    threshold = t.threshold;
    max_depth = std::max<std::size_t>(1, t.max_depth);
  }

  struct Branch {
    std::vector<CoverEntry> entries;
    bool partial = false;
    bool depth_limited = false;
  };
  std::vector<Branch> branches(n);
  parallel_for(n, workers, [&](std::size_t first) {
    Branch& br = branches[first];
    std::vector<std::uint32_t> word{static_cast<std::uint32_t>(first + 1)};
    std::function<void(const ConformalMap&)> visit = [&](const ConformalMap& sw) {
      if (br.partial) return;
      const double diam = sw.image_width(cover.base);
      // A few ulps outward so that rounding in either evaluation path stays covered.
      Interval enc = sw.image(cover.base);
      constexpr double pad = 4.0 * std::numeric_limits<double>::epsilon();
      enc = {enc.lo - pad * std::abs(enc.lo), enc.hi + pad * std::abs(enc.hi)};
      const std::size_t depth = word.size();
      const bool leaf = fixed ? depth == fixed : (diam <= threshold || depth >= max_depth);
      if (leaf) {
        if (!fixed && diam > threshold) br.depth_limited = true;
        if (br.entries.size() >= budget) {
          br.partial = true;
          return;
        }
        br.entries.push_back({Word(word), enc, diam});
        return;
      }
      for (std::size_t j = 0; j < n && !br.partial; ++j) {
        word.push_back(static_cast<std::uint32_t>(j + 1));
        visit(compose(sw, maps[j]));
        word.pop_back();
      }
    };
    visit(maps[first]);
  });

  for (Branch& br : branches) {
    cover.partial = cover.partial || br.partial;
    cover.depth_limited = cover.depth_limited || br.depth_limited;
    for (CoverEntry& e : br.entries) {
      if (cover.entries.size() >= budget) {
        cover.partial = true;
        break;
      }
      cover.max_diameter = std::max(cover.max_diameter, e.diameter);
      cover.entries.push_back(std::move(e));
    }
  }
  return cover;
}

std::vector<UpperSumRow> hausdorff_upper(const IFSFamily& family, double a, std::span<const std::size_t> depths,
                                         std::size_t truncation, std::optional<double> z, std::size_t budget) {
  if (!(a > 0.0)) throw Error(ErrorCode::invalid_argument, "exponent must be positive");
  const std::vector<ConformalMap> maps = family.maps(truncation);
  const std::size_t n = maps.size();
  const Interval x = family.domain();
  const double zz = z.value_or(family.attractor_hull().mid());
  if (!x.contains(zz)) throw Error(ErrorCode::domain, "reference point outside the domain");

  std::size_t deepest = 0;
  for (std::size_t d : depths) deepest = std::max(deepest, d);
  std::vector<CompensatedSum> cover(deepest + 1), transfer(deepest + 1);
  std::vector<std::size_t> words(deepest + 1, 0);
  std::size_t visited = 0;
  bool aborted = false;

  std::function<void(const ConformalMap&, std::size_t)> visit = [&](const ConformalMap& sw, std::size_t depth) {
    if (aborted) return;
    if (++visited > budget) {
      aborted = true;
      return;
    }
    cover[depth].add(std::pow(sw.image_width(x), a));
    transfer[depth].add(std::pow(std::abs(sw.derivative(zz)), a));
    ++words[depth];
    if (depth == deepest) return;
    for (std::size_t j = 0; j < n && !aborted; ++j) visit(compose(sw, maps[j]), depth + 1);
  };
  if (deepest > 0)
    for (std::size_t j = 0; j < n && !aborted; ++j) visit(maps[j], 1);

  CompensatedSum psi_sum;
  for (const ConformalMap& m : maps) psi_sum.add(std::pow(m.R_sup(), a));
  const double psi = psi_sum.value();
  const double tau = family.tail_sup(a, n);
  const double diam_a = std::pow(x.width(), a);

  std::vector<UpperSumRow> rows;
  for (std::size_t d : depths) {
    UpperSumRow r;
    r.n = d;
    if (d == 0) {
      r.cover_sum = diam_a;
      r.transfer = 1.0;
      r.words = 1;
    } else {
      r.cover_sum = cover[d].value();
      r.transfer = transfer[d].value();
      r.words = words[d];
      r.partial = static_cast<double>(words[d]) < std::pow(static_cast<double>(n), static_cast<double>(d));
    }
    const double nd = static_cast<double>(d);
    r.tail_term = tau > 0.0 ? diam_a * (std::pow(psi + tau, nd) - std::pow(psi, nd)) : 0.0;
    r.total = r.cover_sum + r.tail_term;
    rows.push_back(r);
  }
  return rows;
}

BoxDimension box_dimension(std::span<const double> points, std::span<const double> scales) {
  if (scales.size() < 4) throw Error(ErrorCode::invalid_argument, "box counting needs at least 4 scales");
  const auto [smin, smax] = std::minmax_element(scales.begin(), scales.end());
  if (!(*smin > 0.0)) throw Error(ErrorCode::invalid_argument, "scales must be positive");
  if (*smax / *smin < 100.0) throw Error(ErrorCode::invalid_argument, "scales must span at least 2 decades");
  if (points.empty()) throw Error(ErrorCode::invalid_argument, "empty point cloud");

  BoxDimension out;
  out.scales.assign(scales.begin(), scales.end());
  if (points.size() < 10'000) out.warnings.push_back("fewer than 10^4 points; slope is unreliable");
  const auto [pmin, pmax] = std::minmax_element(points.begin(), points.end());
  if (*pmin == *pmax) {
    out.degenerate = true;
    out.counts.assign(scales.size(), 1);
    return out;
  }

  std::vector<double> xs, ys;
  std::vector<std::int64_t> keys(points.size());
  for (double eps : scales) {
    for (std::size_t i = 0; i < points.size(); ++i)
      keys[i] = static_cast<std::int64_t>(std::floor(points[i] / eps));
    std::sort(keys.begin(), keys.end());
    const auto count = static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
    out.counts.push_back(count);
    xs.push_back(std::log(1.0 / eps));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  out.slope = sxy / sxx;
  double ss = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - (my + out.slope * (xs[k] - mx));
    ss += e * e;
  }
  out.residual = std::sqrt(ss / m);
  return out;
}

std::vector<double> dyadic_scales(double diam, int first, int last) {
  std::vector<double> out;
  for (int m = first; m <= last; ++m) out.push_back(std::ldexp(diam, -m));
  return out;
}

void write_points_csv(const PointCloud& cloud, std::ostream& os) {
  const auto prec = os.precision(17);
  os << "x\n";
  for (double p : cloud.points) os << p << '\n';
  os.precision(prec);
}

void write_cover_csv(const CylinderCover& cover, std::ostream& os) {
  const auto prec = os.precision(17);
  os << "word,left,right,diameter\n";
  for (const CoverEntry& e : cover.entries)
    os << e.word.to_string() << ',' << e.enclosure.lo << ',' << e.enclosure.hi << ',' << e.diameter << '\n';
  os.precision(prec);
}

}  // namespace ruelle
