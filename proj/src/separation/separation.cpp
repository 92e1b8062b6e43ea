#include "ruelle/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "ruelle/error.hpp"
#include "ruelle/parallel.hpp"

namespace ruelle {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double roundoff(double a, double b) { return 8.0 * kEps * std::max({1.0, std::abs(a), std::abs(b)}); }

struct Piece {
  Interval iv;
  bool exact = true;
};

constexpr std::size_t kSubdivisions = 32;

// Image of every candidate component under one map. Monotone maps give exact open images;
// otherwise each component is split and enclosed piecewise.
std::vector<Piece> images(const ConformalMap& map, const OpenSetCandidate& u) {
  std::vector<Piece> out;
  for (const Interval& c : u.intervals()) {
    if (map.monotone_certified()) {
      out.push_back({Interval::hull(map(c.lo), map(c.hi)), true});
      continue;
    }
    const double h = c.width() / kSubdivisions;
    for (std::size_t k = 0; k < kSubdivisions; ++k) {
      const Interval piece{c.lo + h * k, k + 1 == kSubdivisions ? c.hi : c.lo + h * (k + 1)};
      out.push_back({map.image(piece), false});
    }
  }
  return out;
}

// Part of `iv` not covered by the closure of `u`, leftmost piece first.
std::optional<Interval> uncovered(const Interval& iv, const OpenSetCandidate& u) {
  double cursor = iv.lo;
  for (const Interval& c : u.intervals()) {
    if (c.hi <= cursor) continue;
    if (c.lo > cursor) return Interval{cursor, std::min(c.lo, iv.hi)};
    cursor = c.hi;
    if (cursor >= iv.hi) return std::nullopt;
  }
  return cursor < iv.hi ? std::optional<Interval>(Interval{cursor, iv.hi}) : std::nullopt;
}

bool inside_one_component(const Interval& iv, const OpenSetCandidate& u) {
  return std::any_of(u.intervals().begin(), u.intervals().end(),
                     [&](const Interval& c) { return c.lo <= iv.lo && iv.hi <= c.hi; });
}

}  // namespace

OpenSetCandidate::OpenSetCandidate(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw Error(ErrorCode::invalid_argument, "open set candidate has no components");
  std::sort(intervals_.begin(), intervals_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    if (!(intervals_[k].lo < intervals_[k].hi))
      throw Error(ErrorCode::invalid_argument, "open set component must satisfy lo < hi");
    if (k > 0 && intervals_[k].lo < intervals_[k - 1].hi)
      throw Error(ErrorCode::invalid_argument, "open set components overlap");
  }
}

bool OpenSetCandidate::contains(double x) const {
  return std::any_of(intervals_.begin(), intervals_.end(), [x](const Interval& c) { return c.lo < x && x < c.hi; });
}

bool OpenSetCandidate::contains_ball(double x, double r) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [x, r](const Interval& c) { return c.lo < x - r && x + r < c.hi; });
}

std::string OpenSetCandidate::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    if (k) os << " u ";
    os << '(' << intervals_[k].lo << ", " << intervals_[k].hi << ')';
  }
  return os.str();
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

SeparationReport check_fosc(const IFSFamily& family, std::size_t n, const OpenSetCandidate& candidate,
                            unsigned workers) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "truncation level must be at least 1");
  if (candidate.empty()) throw Error(ErrorCode::invalid_argument, "empty open set candidate");
  const Interval x0 = family.enlarged_domain();
  for (const Interval& c : candidate.intervals()) {
    if (!x0.contains(c)) {
      std::ostringstream os;
      os << "candidate component (" << c.lo << ", " << c.hi << ") leaves X0 = " << x0;
      throw Error(ErrorCode::domain, os.str());
    }
  }
  if (family.finite() && n > *family.size()) {
    std::ostringstream os;
    os << "level " << n << " exceeds family size " << *family.size();
    throw Error(ErrorCode::index_out_of_family, os.str());
  }

  SeparationReport rep;
  rep.n = n;
  rep.candidate = candidate;
  const std::vector<ConformalMap> maps = family.maps(n);
  std::vector<std::vector<Piece>> img(n);
  parallel_for(n, workers, [&](std::size_t i) { img[i] = images(maps[i], candidate); });

  std::vector<std::vector<Violation>> found(n);
  parallel_for(n, workers, [&](std::size_t i) {
    auto& out = found[i];
    // Containment, one component image at a time.
    for (const Piece& p : img[i]) {
      if (inside_one_component(p.iv, candidate)) continue;
      auto gap = uncovered(p.iv, candidate);
      Interval where = gap ? *gap : p.iv;
      const bool tiny = gap && gap->width() <= roundoff(gap->lo, gap->hi);
      out.push_back({Violation::Kind::containment, i + 1, 0, where, p.exact && !tiny && gap.has_value()});
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      for (const Piece& a : img[i]) {
        for (const Piece& b : img[j]) {
          const double lo = std::max(a.iv.lo, b.iv.lo);
          const double hi = std::min(a.iv.hi, b.iv.hi);
          if (!(lo < hi)) continue;
          const bool certain = a.exact && b.exact && hi - lo > roundoff(lo, hi);
          out.push_back({Violation::Kind::overlap, i + 1, j + 1, Interval{lo, hi}, certain});
        }
      }
    }
  });
  for (auto& v : found) rep.violations.insert(rep.violations.end(), v.begin(), v.end());
  std::stable_sort(rep.violations.begin(), rep.violations.end(), [](const Violation& a, const Violation& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  const bool any_certain = std::any_of(rep.violations.begin(), rep.violations.end(),
                                       [](const Violation& v) { return v.certain; });
  if (rep.violations.empty())
    rep.fosc = Verdict::pass;
  else
    rep.fosc = any_certain ? Verdict::fail : Verdict::unknown;
  if (rep.fosc == Verdict::unknown)
    rep.notes.push_back("only enclosure-level or roundoff-sized violations; not decided");
  return rep;
}

void check_strong(SeparationReport& report, std::span<const SamplePoint> samples) {
  if (report.fosc != Verdict::pass) {
    report.notes.push_back("strong condition not evaluated: finite open set condition did not pass");
    return;
  }
  for (const SamplePoint& p : samples) {
    if (report.candidate.contains_ball(p.x, p.radius)) {
      report.strong = Verdict::pass;
      report.witness_point = p;
      return;
    }
  }
  report.strong = Verdict::unknown;
}

MoranCheck moran_necessary(const IFSFamily& family, std::size_t n, double d) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "truncation level must be at least 1");
  if (!(d > 0.0)) throw Error(ErrorCode::invalid_argument, "ambient dimension must be positive");
  MoranCheck m;
  m.d = d;
  CompensatedSum sum;
  for (const ConformalMap& map : family.maps(n)) sum.add(std::pow(map.R_sup(), d));
  m.partial_sum = sum.value();
  m.sum_with_tail = m.partial_sum + family.tail_sup(d, n);
  try {
    m.c1 = estimate_distortion(family, n).c1;
  } catch (const Error& e) {
    m.status = Verdict::unknown;
    m.note = e.what();
    return m;
  }
  const double bound = std::pow(m.c1, d);
  m.status = m.partial_sum <= bound ? Verdict::pass : Verdict::fail;
  if (m.status == Verdict::pass && !(m.sum_with_tail <= bound))
    m.note = "passes at this level; the bound on the full sum exceeds c1^d";
  return m;
}

std::optional<OpenSetCandidate> suggest_open_set(const IFSFamily& family, std::size_t n, unsigned workers) {
  const Interval x = family.domain();
  const Interval x0 = family.enlarged_domain();
  std::vector<Interval> tries{x};

  Interval hull = family.map_at(1).image(x);
  for (const ConformalMap& m : family.maps(n)) hull = hull.unite(m.image(x));
  tries.push_back(hull);

  for (double f = 0.01; f < 0.5; f += 0.01) tries.push_back(hull.enlarged(-f * hull.width()));

  for (Interval t : tries) {
    t = Interval{std::max(t.lo, x0.lo), std::min(t.hi, x0.hi)};
    if (!(t.lo < t.hi)) continue;
    const OpenSetCandidate u = OpenSetCandidate::single(t.lo, t.hi);
    if (check_fosc(family, n, u, workers).fosc == Verdict::pass) return u;
  }
  return std::nullopt;
}

std::vector<SamplePoint> fixed_point_samples(const IFSFamily& family, std::size_t n, std::size_t k) {
  std::vector<SamplePoint> out;
  const double base = family.domain().mid();
  const std::size_t count = family.effective_truncation(n);
  out.reserve(count);
  for (std::size_t j = 1; j <= count; ++j) {
    const CodingPoint c = coding_map(family, Word::repeated(static_cast<std::uint32_t>(j), k), base);
    out.push_back({c.point, c.error_bound});
  }
  return out;
}

void write_report(const SeparationReport& r, std::ostream& os) {
  const auto prec = os.precision(17);
  os << "level " << r.n << "\ncandidate " << r.candidate.to_string() << "\nfosc " << to_string(r.fosc) << '\n';
  for (const Violation& v : r.violations) {
    if (v.kind == Violation::Kind::overlap)
      os << "overlap " << v.i << ' ' << v.j;
    else
      os << "containment " << v.i;
    os << " (" << v.interval.lo << ", " << v.interval.hi << ')' << (v.certain ? "" : " uncertain") << '\n';
  }
  os << "strong " << to_string(r.strong) << '\n';
  if (r.witness_point) os << "witness " << r.witness_point->x << " +- " << r.witness_point->radius << '\n';
  if (r.moran)
    os << "moran " << to_string(r.moran->status) << " sum " << r.moran->partial_sum << " with_tail "
       << r.moran->sum_with_tail << " c1 " << r.moran->c1 << '\n';
  for (const std::string& note : r.notes) os << "note " << note << '\n';
  os.precision(prec);
}

}  // namespace ruelle
