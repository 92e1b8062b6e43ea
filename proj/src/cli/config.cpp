#include "ruelle/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "ruelle/error.hpp"

#ifndef RUELLE_CONFIG_DIR
#define RUELLE_CONFIG_DIR "configs"
#endif

namespace ruelle::cli {
namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& msg) const {
    std::ostringstream os;
    os << origin_;
    if (node.Mark().line >= 0) os << ':' << node.Mark().line + 1;
    os << ": " << key << ": " << msg;
    throw Error(ErrorCode::config, os.str());
  }

  void require_map(const YAML::Node& node, const std::string& key) const {
    if (!node.IsMap()) fail(node, key, "expected a mapping");
  }

  void allow(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> keys) const {
    require_map(node, section);
    for (const auto& kv : node) {
      const std::string k = kv.first.as<std::string>();
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
        fail(kv.first, section.empty() ? k : section + "." + k, "unknown key");
    }
  }

  double real(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, key, "expected a number");
    try {
      return parse_real(node.Scalar());
    } catch (const Error&) {
      fail(node, key, "cannot parse '" + node.Scalar() + "' as a real number");
    }
  }

  std::uint64_t natural(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, key, "expected a nonnegative integer");
    const std::string& s = node.Scalar();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail(node, key, "cannot parse '" + s + "' as a nonnegative integer");
    return v;
  }

  bool boolean(const YAML::Node& node, const std::string& key) const {
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      fail(node, key, "expected true or false");
    }
  }

  std::string text(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, key, "expected a string");
    return node.Scalar();
  }

  Interval pair(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence() || node.size() != 2) fail(node, key, "expected [lo, hi]");
    return {real(node[0], key), real(node[1], key)};
  }

  std::vector<double> reals(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence()) fail(node, key, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& v : node) out.push_back(real(v, key));
    return out;
  }

 private:
  std::string origin_;
};

void read_family(const Reader& r, const YAML::Node& n, FamilySection& f) {
  r.allow(n, "family",
          {"kind", "domain", "margin", "ratio", "offset", "digits", "min_digit", "maps", "scale", "exponent"});
  if (n["kind"]) f.kind = r.text(n["kind"], "family.kind");
  static const char* kinds[] = {"affine_geometric", "gauss_digits", "gauss_infinite", "explicit_affine", "power_law"};
  if (std::none_of(std::begin(kinds), std::end(kinds), [&](const char* k) { return f.kind == k; }))
    r.fail(n["kind"], "family.kind", "unknown family kind '" + f.kind + "'");
  if (n["domain"]) f.domain = r.pair(n["domain"], "family.domain");
  if (n["margin"]) f.margin = r.real(n["margin"], "family.margin");
  if (n["ratio"]) f.ratio = r.real(n["ratio"], "family.ratio");
  if (n["offset"]) f.offset = r.real(n["offset"], "family.offset");
  if (n["digits"]) {
    if (!n["digits"].IsSequence()) r.fail(n["digits"], "family.digits", "expected a list of digits");
    for (const auto& d : n["digits"]) f.digits.push_back(static_cast<std::uint32_t>(r.natural(d, "family.digits")));
  }
  if (n["min_digit"]) f.min_digit = static_cast<std::uint32_t>(r.natural(n["min_digit"], "family.min_digit"));
  if (n["maps"]) {
    if (!n["maps"].IsSequence()) r.fail(n["maps"], "family.maps", "expected a list of [slope, intercept]");
    for (const auto& m : n["maps"]) {
      const Interval p = r.pair(m, "family.maps");
      f.maps.push_back({p.lo, p.hi});
    }
  }
  if (n["scale"]) f.scale = r.real(n["scale"], "family.scale");
  if (n["exponent"]) f.exponent = r.real(n["exponent"], "family.exponent");
}

void read_numerics(const Reader& r, const YAML::Node& n, NumericsSection& s) {
  r.allow(n, "numerics",
          {"grid", "truncate", "depth", "min_depth", "tol", "rho_tol", "h_tol", "mu_tol", "max_iter", "seed",
           "workers", "tail_model", "theta_offset", "s_max", "word_budget"});
  if (n["grid"]) s.grid = r.natural(n["grid"], "numerics.grid");
  if (n["truncate"]) s.truncate = r.natural(n["truncate"], "numerics.truncate");
  if (n["depth"]) s.depth = r.natural(n["depth"], "numerics.depth");
  if (n["min_depth"]) s.min_depth = r.natural(n["min_depth"], "numerics.min_depth");
  if (n["tol"]) s.tol = r.real(n["tol"], "numerics.tol");
  if (n["rho_tol"]) s.rho_tol = r.real(n["rho_tol"], "numerics.rho_tol");
  if (n["h_tol"]) s.h_tol = r.real(n["h_tol"], "numerics.h_tol");
  if (n["mu_tol"]) s.mu_tol = r.real(n["mu_tol"], "numerics.mu_tol");
  if (n["max_iter"]) s.max_iter = r.natural(n["max_iter"], "numerics.max_iter");
  if (n["seed"]) s.seed = r.natural(n["seed"], "numerics.seed");
  if (n["workers"]) s.workers = static_cast<unsigned>(r.natural(n["workers"], "numerics.workers"));
  if (n["tail_model"]) {
    const std::string t = r.text(n["tail_model"], "numerics.tail_model");
    if (t == "none")
      s.tail_model = TailModel::none;
    else if (t == "integral")
      s.tail_model = TailModel::integral;
    else
      r.fail(n["tail_model"], "numerics.tail_model", "expected 'none' or 'integral'");
  }
  if (n["theta_offset"]) s.theta_offset = r.real(n["theta_offset"], "numerics.theta_offset");
  if (n["s_max"]) s.s_max = r.real(n["s_max"], "numerics.s_max");
  if (n["word_budget"]) s.word_budget = r.natural(n["word_budget"], "numerics.word_budget");
}

}  // namespace

double parse_real(const std::string& text) {
  auto number = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw Error(ErrorCode::config, "not a number: '" + text + "'");
    return v;
  };
  const std::string_view sv(text);
  const auto slash = sv.find('/');
  if (slash == std::string_view::npos) return number(sv);
  const double den = number(sv.substr(slash + 1));
  if (den == 0.0) throw Error(ErrorCode::config, "zero denominator in '" + text + "'");
  return number(sv.substr(0, slash)) / den;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  const Reader r(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << origin << ':' << e.mark.line + 1 << ": " << e.msg;
    throw Error(ErrorCode::config, os.str());
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  r.allow(root, "", {"name", "family", "numerics", "eigen", "pressure", "osc", "attractor"});
  if (root["name"]) cfg.name = r.text(root["name"], "name");
  if (root["family"]) read_family(r, root["family"], cfg.family);
  if (root["numerics"]) read_numerics(r, root["numerics"], cfg.numerics);
  if (const auto n = root["eigen"]) {
    r.allow(n, "eigen", {"s"});
    if (n["s"]) cfg.eigen.s = r.real(n["s"], "eigen.s");
  }
  if (const auto n = root["pressure"]) {
    r.allow(n, "pressure", {"s_min", "s_max", "steps", "s"});
    if (n["s_min"]) cfg.pressure.s_min = r.real(n["s_min"], "pressure.s_min");
    if (n["s_max"]) cfg.pressure.s_max = r.real(n["s_max"], "pressure.s_max");
    if (n["steps"]) cfg.pressure.steps = r.natural(n["steps"], "pressure.steps");
    if (n["s"]) cfg.pressure.s = r.reals(n["s"], "pressure.s");
  }
  if (const auto n = root["osc"]) {
    r.allow(n, "osc", {"n", "candidate", "suggest", "word_length", "samples"});
    if (n["n"]) cfg.osc.n = r.natural(n["n"], "osc.n");
    if (n["candidate"]) {
      if (!n["candidate"].IsSequence()) r.fail(n["candidate"], "osc.candidate", "expected a list of [lo, hi]");
      for (const auto& c : n["candidate"]) cfg.osc.candidate.push_back(r.pair(c, "osc.candidate"));
    }
    if (n["suggest"]) cfg.osc.suggest = r.boolean(n["suggest"], "osc.suggest");
    if (n["word_length"]) cfg.osc.word_length = r.natural(n["word_length"], "osc.word_length");
    if (n["samples"]) cfg.osc.samples = r.natural(n["samples"], "osc.samples");
  }
  if (const auto n = root["attractor"]) {
    r.allow(n, "attractor", {"count", "word_length", "scales", "weights_exponent", "cover_depth"});
    if (n["count"]) cfg.attractor.count = r.natural(n["count"], "attractor.count");
    if (n["word_length"]) cfg.attractor.word_length = r.natural(n["word_length"], "attractor.word_length");
    if (n["scales"]) cfg.attractor.scales = r.reals(n["scales"], "attractor.scales");
    if (n["weights_exponent"]) cfg.attractor.weights_exponent = r.real(n["weights_exponent"], "attractor.weights_exponent");
    if (n["cover_depth"]) cfg.attractor.cover_depth = r.natural(n["cover_depth"], "attractor.cover_depth");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str(), path.string());
  cfg.source = path;
  if (cfg.name.empty()) cfg.name = path.stem().string();
  return cfg;
}

std::filesystem::path resolve_config(const std::string& name_or_path) {
  const std::filesystem::path p(name_or_path);
  if (std::filesystem::exists(p)) return p;
  const std::filesystem::path bundled = std::filesystem::path(RUELLE_CONFIG_DIR) / (name_or_path + ".yaml");
  if (std::filesystem::exists(bundled)) return bundled;
  std::string known;
  for (const auto& b : bundled_configs()) known += (known.empty() ? "" : ", ") + b;
  throw Error(ErrorCode::config, "no config file or bundled config named '" + name_or_path + "' (bundled: " + known + ")");
}

std::vector<std::string> bundled_configs() {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(RUELLE_CONFIG_DIR, ec))
    if (e.path().extension() == ".yaml") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

void validate(const RunConfig& cfg) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::config, msg); };
  const auto& n = cfg.numerics;
  if (n.grid < 2) bad("numerics.grid must be at least 2");
  if (n.truncate < 1) bad("numerics.truncate must be at least 1");
  if (n.depth < 1) bad("numerics.depth must be at least 1");
  for (auto [key, v] : {std::pair{"numerics.tol", n.tol}, {"numerics.rho_tol", n.rho_tol}, {"numerics.h_tol", n.h_tol},
                        {"numerics.mu_tol", n.mu_tol}, {"numerics.theta_offset", n.theta_offset}})
    if (!(v > 0.0)) bad(std::string(key) + " must be positive");
  if (n.max_iter < 1) bad("numerics.max_iter must be at least 1");
  if (!(cfg.family.domain.lo < cfg.family.domain.hi)) bad("family.domain must satisfy lo < hi");
  if (cfg.family.margin < 0.0) bad("family.margin must be nonnegative");
  if (cfg.pressure.s.empty() && cfg.pressure.steps < 1) bad("pressure.steps must be at least 1");
  if (cfg.osc.n < 1) bad("osc.n must be at least 1");
  if (cfg.attractor.count < 1) bad("attractor.count must be at least 1");
  if (cfg.attractor.cover_depth < 1) bad("attractor.cover_depth must be at least 1");
}

IFSFamily build_family(const RunConfig& cfg) {
  const FamilySection& f = cfg.family;
  if (f.kind == "affine_geometric") return make_affine_geometric(f.ratio, f.offset, f.domain, f.margin);
  if (f.kind == "gauss_digits") {
    if (f.digits.empty()) throw Error(ErrorCode::config, "family.digits is required for gauss_digits");
    return make_gauss_digits(f.digits, f.domain, f.margin);
  }
  if (f.kind == "gauss_infinite") return make_gauss_infinite(f.min_digit, f.domain, f.margin);
  if (f.kind == "explicit_affine") {
    if (f.maps.empty()) throw Error(ErrorCode::config, "family.maps is required for explicit_affine");
    return make_explicit_affine(f.maps, f.domain, f.margin);
  }
  return make_power_law(f.scale, f.exponent, f.domain, f.margin);
}

}  // namespace ruelle::cli
