#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ruelle/ifs.hpp"

namespace ruelle {

struct ChaosOptions {
  std::size_t count = 10'000;
  std::size_t word_length = 40;
  std::uint64_t seed = 1;
  /// Symbol weights r_j^a / sum r_j^a when set, uniform otherwise.
  std::optional<double> weight_exponent;
  /// A warning is attached when s^k diam(X) exceeds this.
  double accuracy = 1e-10;
  unsigned workers = 0;
};

struct PointCloud {
  std::vector<double> points;
  std::size_t word_length = 0;
  std::size_t truncation = 0;
  std::uint64_t seed = 0;
  std::vector<double> weights;  // normalized, one per symbol j <= N
  double error_radius = 0.0;    // every point lies within this of the limit set
  std::vector<std::string> warnings;
};

/// Each point is the coding-map image of an independent random word of length k,
/// drawn from a stream determined by (seed, point index) alone.
PointCloud chaos_game(const IFSFamily& family, std::size_t truncation, const ChaosOptions& options = {});

struct FixedDepth {
  std::size_t depth = 1;
};
struct DiameterThreshold {
  double threshold = 1e-2;
  std::size_t max_depth = 64;
};
using CoverPolicy = std::variant<FixedDepth, DiameterThreshold>;

struct CoverEntry {
  Word word;
  Interval enclosure;
  double diameter = 0.0;
};

struct CylinderCover {
  std::vector<CoverEntry> entries;  // lexicographic by word
  double max_diameter = 0.0;
  CoverPolicy policy;
  Interval base;                    // s_w is applied to this interval
  std::size_t truncation = 0;
  double uncovered_tail = 0.0;      // sum_{j>N} R_j diam(X)
  bool partial = false;             // entry budget exhausted
  bool depth_limited = false;       // threshold policy hit max_depth
};

CylinderCover cylinder_cover(const IFSFamily& family, std::size_t truncation, const CoverPolicy& policy,
                             std::size_t budget = 1'000'000, unsigned workers = 0);

struct UpperSumRow {
  std::size_t n = 0;
  double cover_sum = 0.0;   // sum over |w| = n, w <= N, of |s_w(X)|^a
  double tail_term = 0.0;   // diam^a [(psi_N + tau)^n - psi_N^n]
  double total = 0.0;
  double transfer = 0.0;    // T_a^n 1(z) of the truncated family
  std::size_t words = 0;
  bool partial = false;
};

std::vector<UpperSumRow> hausdorff_upper(const IFSFamily& family, double a, std::span<const std::size_t> depths,
                                         std::size_t truncation, std::optional<double> z = std::nullopt,
                                         std::size_t budget = 4'000'000);

struct BoxDimension {
  double slope = 0.0;
  double residual = 0.0;  // root-mean-square deviation of the fit
  bool degenerate = false;
  std::vector<double> scales;
  std::vector<std::size_t> counts;
  std::vector<std::string> warnings;
};

/// Needs at least 4 scales spanning 2 decades.
BoxDimension box_dimension(std::span<const double> points, std::span<const double> scales);

/// diam * 2^-m for m = first..last.
std::vector<double> dyadic_scales(double diam, int first = 2, int last = 14);

void write_points_csv(const PointCloud& cloud, std::ostream& os);
void write_cover_csv(const CylinderCover& cover, std::ostream& os);

}  // namespace ruelle
