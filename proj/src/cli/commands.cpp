#include "ruelle/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "ruelle/attractor.hpp"
#include "ruelle/dimension.hpp"
#include "ruelle/error.hpp"
#include "ruelle/separation.hpp"

namespace ruelle::cli {
namespace {

using json = nlohmann::ordered_json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json pair(const Interval& iv) { return json::array({num(iv.lo), num(iv.hi)}); }

json family_record(const RunConfig& cfg, const IFSFamily& f) {
  json j;
  j["config"] = cfg.name;
  j["kind"] = cfg.family.kind;
  j["description"] = f.description();
  j["domain"] = pair(f.domain());
  j["finite"] = f.finite();
  if (f.size()) j["size"] = *f.size();
  j["contraction"] = num(f.contraction());
  j["attractor_hull"] = pair(f.attractor_hull());
  j["flags"] = f.flags();
  return j;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

int report_error(const std::string& command, const Error& e, std::ostream& out, std::ostream& err) {
  json j;
  j["command"] = command;
  j["status"] = to_string(e.code());
  j["message"] = e.what();
  if (const auto* nr = dynamic_cast<const NoRootError*>(&e)) {
    json samples = json::array();
    for (auto [s, v] : nr->psi_samples()) samples.push_back({{"s", num(s)}, {"psi", num(v)}});
    j["psi_samples"] = samples;
  }
  if (const auto* nc = dynamic_cast<const NonConvergenceError*>(&e)) {
    j["last_bracket"] = json::array({num(nc->lower()), num(nc->upper())});
    j["iterations"] = nc->iterations();
  }
  emit(out, j);
  err << "error: " << e.what() << '\n';
  switch (e.code()) {
    case ErrorCode::config:
    case ErrorCode::invalid_argument:
    case ErrorCode::domain:
    case ErrorCode::index_out_of_family:
      return exit_usage;
    default:
      return exit_numerical;
  }
}

std::ofstream open_plot(const Outputs& io, const std::string& file) {
  std::filesystem::create_directories(*io.plot_dir);
  std::ofstream os(*io.plot_dir / file);
  if (!os) throw Error(ErrorCode::invalid_argument, "cannot write " + (*io.plot_dir / file).string());
  os.precision(17);
  return os;
}

PressureOptions pressure_options(const NumericsSection& n) {
  PressureOptions p;
  p.grid = n.grid;
  p.rho_tol = n.rho_tol;
  p.max_iter = n.max_iter;
  p.tail_model = n.tail_model;
  p.workers = n.workers;
  p.word_budget = n.word_budget;
  return p;
}

json pressure_record(const PressurePoint& p) {
  return {{"s", num(p.s)},     {"lower", num(p.lower)}, {"upper", num(p.upper)}, {"depth", p.depth},
          {"words", p.words}, {"partial", p.partial}, {"exact", p.exact}};
}

template <typename Fn>
int guarded(const std::string& command, std::ostream& out, std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report_error(command, e, out, err);
  }
}

}  // namespace

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  auto& n = cfg.numerics;
  if (o.seed) n.seed = *o.seed;
  if (o.grid) n.grid = *o.grid;
  if (o.truncate) n.truncate = *o.truncate;
  if (o.depth) n.depth = *o.depth;
  if (o.tol) n.tol = *o.tol;
  if (o.workers) n.workers = *o.workers;
  if (o.eigen_s) cfg.eigen.s = *o.eigen_s;
  if (o.s_min) cfg.pressure.s_min = *o.s_min;
  if (o.s_max) cfg.pressure.s_max = *o.s_max;
  if (o.steps) {
    cfg.pressure.steps = *o.steps;
    cfg.pressure.s.clear();
  }
  if (o.s_min || o.s_max) cfg.pressure.s.clear();
  if (o.osc_n) cfg.osc.n = *o.osc_n;
  if (!o.candidate.empty()) cfg.osc.candidate = o.candidate;
  if (o.suggest) cfg.osc.suggest = true;
  if (o.count) cfg.attractor.count = *o.count;
  if (o.word_length) cfg.attractor.word_length = *o.word_length;
}

std::vector<double> pressure_grid(const PressureSection& p) {
  if (!p.s.empty()) return p.s;
  std::vector<double> out;
  if (p.steps <= 1) return {p.s_min};
  for (std::size_t k = 0; k < p.steps; ++k)
    out.push_back(p.s_min + (p.s_max - p.s_min) * static_cast<double>(k) / static_cast<double>(p.steps - 1));
  return out;
}

int cmd_dim(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err) {
  return guarded("dim", out, err, [&] {
    validate(cfg);
    const IFSFamily family = build_family(cfg);
    const auto& n = cfg.numerics;
    DimensionOptions opt;
    opt.pressure = pressure_options(n);
    opt.tol = n.tol;
    opt.theta_offset = n.theta_offset;
    opt.s_max = n.s_max;
    opt.min_depth = n.min_depth;
    const DimensionResult r = hausdorff_dimension(family, n.depth, n.truncate, opt);

    json j;
    j["command"] = "dim";
    j["status"] = r.certified ? "certified" : "budget-exhausted";
    j["family"] = family_record(cfg, family);
    j["a"] = num(r.a);
    j["a_bracket"] = json::array({num(r.a_lo), num(r.a_hi)});
    j["bracket_width"] = num(r.a_hi - r.a_lo);
    j["tol"] = n.tol;
    j["certified"] = r.certified;
    j["budget_exhausted"] = r.budget_exhausted;
    j["theta"] = num(r.theta);
    j["psi_at_theta_diverges"] = r.psi_at_theta_diverges;
    j["psi_low"] = num(r.psi_low);
    j["psi_high_upper_bound"] = num(r.psi_high);
    j["truncation"] = r.truncation;
    j["tail_bound_at_a"] = num(family.tail_sup(r.a, r.truncation));
    j["depth"] = r.depth;
    j["bisection_steps"] = r.iterations;
    j["pressure_at_a_lo"] = pressure_record(r.at_lo);
    j["pressure_at_a_hi"] = pressure_record(r.at_hi);
    emit(out, j);

    if (io.plot_dir) {
      auto os = open_plot(io, "pressure_near_root.dat");
      const double lo = std::max(r.theta + n.theta_offset, r.a - 0.1);
      for (int k = 0; k <= 20; ++k) {
        const double s = lo + (r.a + 0.1 - lo) * k / 20.0;
        const PerronData pd = spectral_radius(family, Potential::geometric(s), n.truncate, n.grid, n.rho_tol,
                                              n.max_iter, n.tail_model);
        os << s << ' ' << std::log(pd.rho) << '\n';
      }
    }
    return r.certified ? exit_ok : exit_numerical;
  });
}

int cmd_eigen(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err) {
  return guarded("eigen", out, err, [&] {
    validate(cfg);
    const IFSFamily family = build_family(cfg);
    const auto& n = cfg.numerics;
    PerronOptions opt;
    opt.grid = n.grid;
    opt.op.truncation = n.truncate;
    opt.op.tail_model = n.tail_model;
    opt.op.workers = n.workers;
    opt.rho_tol = n.rho_tol;
    opt.h_tol = n.h_tol;
    opt.mu_tol = n.mu_tol;
    opt.max_iter = n.max_iter;
    const double s = cfg.eigen.s;
    const PerronData pd = perron_pair(family, Potential::geometric(s), opt);

    json j;
    j["command"] = "eigen";
    j["status"] = "ok";
    j["family"] = family_record(cfg, family);
    j["s"] = s;
    j["rho"] = num(pd.rho);
    j["rho_bracket"] = pair(pd.rho_bracket);
    j["rho_bracket_with_tail"] = pair(pd.rho_bracket_with_tail);
    j["tail_bound"] = num(pd.tail_bound);
    j["truncation"] = family.effective_truncation(n.truncate);
    j["tail_model"] = n.tail_model == TailModel::integral ? "integral" : "none";
    j["iterations"] = pd.iterations;
    j["h_iterations"] = pd.h_iterations;
    j["mu_iterations"] = pd.mu_iterations;
    j["pairing"] = num(pd.pairing);
    j["mu_total_mass"] = num(pd.mu.total_mass());
    j["sup_residual"] = num(pd.sup_residual);
    j["mu_drift"] = num(pd.mu_drift);
    j["h_last_step"] = pd.h_residuals.empty() ? json(nullptr) : num(pd.h_residuals.back());
    j["h_min_over_max"] = num(pd.h_min_over_max);
    j["h_floor"] = pd.h_floor ? num(*pd.h_floor) : json(nullptr);
    json h;
    h["grid"] = {{"lo", pd.grid.lo}, {"hi", pd.grid.hi}, {"size", pd.grid.size}};
    json values = json::array();
    if (pd.h)
      for (double v : pd.h->values()) values.push_back(num(v));
    h["values"] = values;
    j["h"] = h;
    emit(out, j);

    if (io.trace) {
      std::ofstream os(*io.trace);
      if (!os) throw Error(ErrorCode::invalid_argument, "cannot write trace file " + io.trace->string());
      write_trace_csv(pd.trace, os);
    }
    if (io.plot_dir) {
      auto hs = open_plot(io, "eigenfunction.dat");
      if (pd.h)
        for (std::size_t k = 0; k < pd.grid.size; ++k) hs << pd.grid.node(k) << ' ' << pd.h->values()[k] << '\n';
      auto ms = open_plot(io, "eigenmeasure.dat");
      for (const Atom& a : pd.mu.atoms()) ms << a.position << ' ' << a.mass << '\n';
    }
    return exit_ok;
  });
}

int cmd_pressure(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err) {
  return guarded("pressure", out, err, [&] {
    validate(cfg);
    const IFSFamily family = build_family(cfg);
    const auto& n = cfg.numerics;
    const std::vector<double> grid = pressure_grid(cfg.pressure);
    const PressureOptions opt = pressure_options(n);
    std::vector<std::optional<PressurePoint>> rows;
    for (double s : grid) {
      try {
        rows.push_back(pressure(family, s, n.depth, n.truncate, opt));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::summability) throw;
        rows.push_back(std::nullopt);
      }
    }
    write_pressure_csv(rows, grid, out);
    if (io.plot_dir) {
      auto os = open_plot(io, "pressure.dat");
      for (const auto& r : rows)
        if (r) os << r->s << ' ' << r->log_rho << '\n';
    }
    return exit_ok;
  });
}

int cmd_osc(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err) {
  return guarded("osc", out, err, [&] {
    validate(cfg);
    const IFSFamily family = build_family(cfg);
    const auto& o = cfg.osc;
    json j;
    j["command"] = "osc";
    j["family"] = family_record(cfg, family);

    OpenSetCandidate candidate = o.candidate.empty()
                                     ? OpenSetCandidate::single(family.domain().lo, family.domain().hi)
                                     : OpenSetCandidate(o.candidate);
    if (o.suggest) {
      const auto s = suggest_open_set(family, o.n, cfg.numerics.workers);
      if (s) {
        candidate = *s;
        json comps = json::array();
        for (const Interval& c : s->intervals()) comps.push_back(pair(c));
        j["suggested"] = comps;
      } else {
        j["suggested"] = nullptr;
      }
    }

    SeparationReport rep = check_fosc(family, o.n, candidate, cfg.numerics.workers);
    std::vector<SamplePoint> samples = fixed_point_samples(family, o.n, o.word_length);
    ChaosOptions co;
    co.count = std::max<std::size_t>(1, o.samples);
    co.word_length = o.word_length;
    co.seed = cfg.numerics.seed;
    co.workers = cfg.numerics.workers;
    const PointCloud cloud = chaos_game(family, o.n, co);
    for (double x : cloud.points) samples.push_back({x, cloud.error_radius});
    check_strong(rep, samples);
    rep.moran = moran_necessary(family, o.n);

    j["status"] = "ok";
    j["n"] = rep.n;
    json comps = json::array();
    for (const Interval& c : rep.candidate.intervals()) comps.push_back(pair(c));
    j["candidate"] = comps;
    j["fosc"] = to_string(rep.fosc);
    json viol = json::array();
    for (const Violation& v : rep.violations) {
      json e;
      e["kind"] = v.kind == Violation::Kind::overlap ? "overlap" : "containment";
      e["i"] = v.i;
      if (v.kind == Violation::Kind::overlap) e["j"] = v.j;
      e["interval"] = pair(v.interval);
      e["certain"] = v.certain;
      viol.push_back(e);
    }
    j["violations"] = viol;
    j["strong"] = to_string(rep.strong);
    if (rep.witness_point)
      j["witness"] = {{"x", num(rep.witness_point->x)}, {"radius", num(rep.witness_point->radius)}};
    else
      j["witness"] = nullptr;
    const MoranCheck& m = *rep.moran;
    j["moran"] = {{"status", to_string(m.status)}, {"d", m.d},
                  {"partial_sum", num(m.partial_sum)}, {"sum_with_tail", num(m.sum_with_tail)},
                  {"c1", num(m.c1)}, {"note", m.note}};
    j["notes"] = rep.notes;
    emit(out, j);

    if (io.plot_dir) {
      auto os = open_plot(io, "images.dat");
      const auto maps = family.maps(o.n);
      for (const ConformalMap& map : maps)
        for (const Interval& c : rep.candidate.intervals()) {
          const Interval im = map.image(c);
          os << im.lo << ' ' << im.hi << '\n';
        }
    }
    return exit_ok;
  });
}

int cmd_attractor(const RunConfig& cfg, const Outputs& io, std::ostream& out, std::ostream& err) {
  return guarded("attractor", out, err, [&] {
    validate(cfg);
    const IFSFamily family = build_family(cfg);
    const auto& a = cfg.attractor;
    ChaosOptions co;
    co.count = a.count;
    co.word_length = a.word_length;
    co.seed = cfg.numerics.seed;
    co.weight_exponent = a.weights_exponent;
    co.workers = cfg.numerics.workers;
    const PointCloud cloud = chaos_game(family, cfg.numerics.truncate, co);
    const std::vector<double> scales =
        a.scales.empty() ? dyadic_scales(family.domain().width()) : a.scales;
    const BoxDimension box = box_dimension(cloud.points, scales);
    const CylinderCover cover =
        cylinder_cover(family, cfg.numerics.truncate, FixedDepth{a.cover_depth}, cfg.numerics.word_budget,
                       cfg.numerics.workers);

    json j;
    j["command"] = "attractor";
    j["status"] = "ok";
    j["family"] = family_record(cfg, family);
    const auto [pmin, pmax] = std::minmax_element(cloud.points.begin(), cloud.points.end());
    j["points"] = {{"count", cloud.points.size()}, {"word_length", cloud.word_length},
                   {"truncation", cloud.truncation}, {"seed", cloud.seed},
                   {"error_radius", num(cloud.error_radius)}, {"hull", json::array({num(*pmin), num(*pmax)})}};
    j["box_dimension"] = {{"slope", num(box.slope)},  {"residual", num(box.residual)},
                          {"degenerate", box.degenerate}, {"scales", box.scales},
                          {"counts", box.counts}};
    j["cover"] = {{"depth", a.cover_depth},         {"entries", cover.entries.size()},
                  {"max_diameter", num(cover.max_diameter)}, {"uncovered_tail", num(cover.uncovered_tail)},
                  {"partial", cover.partial}};
    std::vector<std::string> warnings = cloud.warnings;
    warnings.insert(warnings.end(), box.warnings.begin(), box.warnings.end());
    if (cover.partial) warnings.push_back("cover enumeration budget exhausted; cover is partial");
    j["warnings"] = warnings;
    emit(out, j);

    if (io.plot_dir) {
      auto ps = open_plot(io, "points.csv");
      write_points_csv(cloud, ps);
      auto cs = open_plot(io, "cover.csv");
      write_cover_csv(cover, cs);
      auto bs = open_plot(io, "boxcount.dat");
      for (std::size_t k = 0; k < box.scales.size(); ++k)
        bs << std::log(1.0 / box.scales[k]) << ' ' << std::log(static_cast<double>(box.counts[k])) << '\n';
    }
    return exit_ok;
  });
}

}  // namespace ruelle::cli
