#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruelle/ifs.hpp"
#include "ruelle/interval.hpp"

namespace ruelle {

/// Finite union of pairwise disjoint, nonempty open intervals (lo, hi).
class OpenSetCandidate {
 public:
  OpenSetCandidate() = default;
  /// Sorts the components; throws invalid_argument when empty, degenerate or overlapping.
  explicit OpenSetCandidate(std::vector<Interval> intervals);
  static OpenSetCandidate single(double lo, double hi) { return OpenSetCandidate({Interval{lo, hi}}); }

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  /// Open membership.
  bool contains(double x) const;
  /// True when (x - r, x + r) lies inside one component.
  bool contains_ball(double x, double r) const;
  std::string to_string() const;

 private:
  std::vector<Interval> intervals_;
};

enum class Verdict { pass, fail, unknown };
const char* to_string(Verdict v) noexcept;

struct Violation {
  enum class Kind { overlap, containment };
  Kind kind = Kind::overlap;
  std::size_t i = 0;
  std::size_t j = 0;      // 0 for containment failures
  Interval interval;      // open overlap, or the part of s_i(U) outside U
  bool certain = true;    // false when only an enclosure or a roundoff-sized gap is involved
};

struct MoranCheck {
  Verdict status = Verdict::unknown;
  double d = 1.0;
  double partial_sum = 0.0;    // sum_{i<=n} R_i^d, the quantity tested against c1^d
  double sum_with_tail = 0.0;  // partial_sum plus the certified bound on sum_{i>n} R_i^d
  double c1 = 1.0;
  std::string note;
};

struct SamplePoint {
  double x = 0.0;
  double radius = 0.0;  // distance to the limit set is at most this
};

struct SeparationReport {
  std::size_t n = 0;
  OpenSetCandidate candidate;
  Verdict fosc = Verdict::unknown;
  std::vector<Violation> violations;  // lexicographic in (kind, i, j)
  Verdict strong = Verdict::unknown;
  std::optional<SamplePoint> witness_point;
  std::optional<MoranCheck> moran;
  std::vector<std::string> notes;
};

/// Checks s_i(U) ⊆ U and pairwise disjoint images for i, j <= n.
SeparationReport check_fosc(const IFSFamily& family, std::size_t n, const OpenSetCandidate& candidate,
                            unsigned workers = 0);

/// Sets report.strong to pass with a witness when some sample's error ball lies inside U.
/// Never asserts fail. Leaves strong unchanged unless report.fosc is pass.
void check_strong(SeparationReport& report, std::span<const SamplePoint> samples);

/// Necessary volume condition sum_{i<=n} R_i^d <= c1^d.
MoranCheck moran_necessary(const IFSFamily& family, std::size_t n, double d = 1.0);

/// First passing candidate among: interior of X, hull of first-level images, that hull shrunk by a margin sweep.
std::optional<OpenSetCandidate> suggest_open_set(const IFSFamily& family, std::size_t n, unsigned workers = 0);

/// Fixed points of s_1..s_n, from the coding map of constant words of length k.
std::vector<SamplePoint> fixed_point_samples(const IFSFamily& family, std::size_t n, std::size_t k);

void write_report(const SeparationReport& report, std::ostream& os);

}  // namespace ruelle
