#include "trinorm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "trinorm/bounds.hpp"
#include "trinorm/coupling.hpp"
#include "trinorm/errors.hpp"
#include "trinorm/moments.hpp"
#include "trinorm/oracle.hpp"
#include "trinorm/patterns.hpp"
#include "trinorm/special.hpp"

namespace trinorm {

using json = nlohmann::ordered_json;

namespace {

constexpr double kPowerGuard = 4.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid nonnegative integer for '" + key + "': '" + s + "'");
  }
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class Recorder {
 public:
  explicit Recorder(const ExperimentConfig& cfg) : config_(cfg.to_json()), stamp_(utc_now()) {}

  ResultRecord& add(const std::string& quantity, std::optional<int> n, std::optional<double> p,
                    double value, std::optional<double> se = std::nullopt) {
    if (!std::isfinite(value)) throw NumericError("non-finite value for " + quantity);
    ResultRecord r;
    r.config = config_;
    r.quantity = quantity;
    r.n = n;
    r.p = p;
    r.value = value;
    r.std_error = se;
    if (n && p) r.regime = to_string(classify_regime(*n, *p));
    r.timestamp = stamp_;
    out.records.push_back(std::move(r));
    return out.records.back();
  }

  RunOutput out;

 private:
  json config_;
  std::string stamp_;
};

std::vector<double> grid_or(const ExperimentConfig& cfg, std::vector<double> fallback) {
  return cfg.t_grid.empty() ? std::move(fallback) : cfg.t_grid;
}

void run_moments(const ExperimentConfig& cfg, Recorder& rec) {
  for (int n : cfg.n_list) {
    const double p = cfg.p_rule.at(n);
    const auto m = exact_moments(n, p);
    rec.add("mean_T", n, p, m.mean_T);
    rec.add("var_T", n, p, m.var_T);
    rec.add("sigma", n, p, m.sigma);
    rec.add("var_X", n, p, m.var_X);
    rec.add("cov_overlap2", n, p, m.cov_overlap2);
  }
}

void run_bound(const ExperimentConfig& cfg, Recorder& rec) {
  for (int n : cfg.n_list) {
    const double p = cfg.p_rule.at(n);
    const auto rates = regime_rates(n, p);
    const auto m = exact_moments(n, p);
    rec.add("s2", n, p, rates.s2);
    rec.add("thm1_rate", n, p, rates.thm1_rate);
    rec.add("wasserstein_rate", n, p, rates.wasserstein_rate);
    rec.add("dk_from_wasserstein", n, p, dk_from_dw(rates.wasserstein_rate));
    const double r3 = r3_theoretical(n, p, m.sigma);
    const double r4 = r4_theoretical(n, p, m.sigma);
    rec.add("r3_theoretical", n, p, r3);
    rec.add("r4_theoretical", n, p, r4);
    BoundInputs in;
    in.r3 = r3;
    in.r3_tilde = r3;
    in.r4 = r4;
    rec.add("theorem2_extended_theoretical", n, p, theorem2_bound(in, BoundForm::Extended))
        .extra = {{"r3", r3}, {"r3_tilde", r3}, {"r4", r4}};
  }
}

void run_sample_dk(const ExperimentConfig& cfg, Recorder& rec) {
  for (int n : cfg.n_list) {
    const double p = cfg.p_rule.at(n);
    const auto w = sample_w(n, p, cfg.samples, cfg.seed, cfg.streams);
    const auto d = empirical_dk(w, cfg.delta);
    rec.add("dk", n, p, d.dk).extra = {{"dkw_band", d.dkw_band}, {"samples", d.samples}};
  }
}

void run_oracle(const ExperimentConfig& cfg, Recorder& rec) {
  const auto grid = grid_or(cfg, {0.5, 1.0, 2.0, 4.0});
  for (int n : cfg.n_list) {
    const double p = cfg.p_rule.at(n);
    const auto dist = enumerate_distribution(n, p);
    json atoms = json::array();
    for (const auto& [k, pr] : dist.atoms) atoms.push_back({k, pr});
    rec.add("exact_distribution", n, p, static_cast<double>(dist.atoms.size())).extra = {
        {"atoms", atoms}};
    rec.add("oracle_mean_T", n, p, dist.mean());
    rec.add("oracle_var_T", n, p, dist.variance());
    rec.add("exact_dk", n, p, exact_dk(n, p));
    for (double t : grid) {
      const auto ode = exact_chf_ode(n, p, t);
      rec.add("ode_residual", n, p, ode.residual).extra = {
          {"t", t},
          {"phi", {ode.phi.real(), ode.phi.imag()}},
          {"a_t", {ode.a_t.real(), ode.a_t.imag()}},
          {"b_t", {ode.b_t.real(), ode.b_t.imag()}}};
    }
    if (n > kOracleCouplingMaxN) continue;
    const auto fam = test_function_family(grid);
    const auto res = verify_couplings(n, p, fam);
    json stein = json::object(), weak = json::object();
    for (const auto& [name, r] : res.stein) stein[name] = r;
    for (const auto& [name, r] : res.weak_extended) weak[name] = r;
    rec.add("coupling_residual_max", n, p, res.max_residual()).extra = {
        {"stein", stein},
        {"weak_extended", weak},
        {"conditional_gd", res.conditional_gd},
        {"mean_S", res.mean_S},
        {"mean_S_analytic", res.mean_S_analytic},
        {"mean_GD", res.mean_GD}};
    const auto r = exact_r_terms(n, p, grid);
    rec.add("exact_r1", n, p, r.r1);
    rec.add("exact_r32", n, p, r.r32);
    rec.add("exact_r33", n, p, r.r33);
    rec.add("exact_r3", n, p, r.r3);
    rec.add("exact_r2", n, p, r.r2).extra = {{"t_grid", r.t_grid}, {"r2_t", r.r2_t}};
    rec.add("exact_r4", n, p, r.r4).extra = {{"t_grid", r.t_grid}};
  }
}

void run_coupling(const ExperimentConfig& cfg, Recorder& rec) {
  const RTildePolicy policy =
      cfg.policy == "theoretical" ? RTildePolicy::Theoretical : RTildePolicy::Estimate;
  for (int n : cfg.n_list) {
    const double p = cfg.p_rule.at(n);
    EstimateConfig ec;
    ec.n = n;
    ec.p = p;
    ec.samples = cfg.samples;
    ec.seed = cfg.seed;
    ec.t_grid = cfg.t_grid;
    const auto est = estimate_r(ec);
    const std::pair<const char*, const RTermEstimate*> terms[] = {
        {"r1", &est.r1},   {"r2", &est.r2},   {"r31", &est.r31}, {"r32", &est.r32},
        {"r33", &est.r33}, {"r3", &est.r3},   {"r41", &est.r41}, {"r42", &est.r42},
        {"r43", &est.r43}, {"r4", &est.r4}};
    for (const auto& [name, e] : terms) {
      auto& r = rec.add(name, n, p, e->value, e->std_error);
      r.extra = {{"samples", e->samples}};
      if (e->t) r.extra["t"] = *e->t;
    }
    const auto rep = assemble_bound(n, p, est, policy);
    auto& b = rec.add("bound_extended", n, p, rep.extended_bound);
    b.extra = {{"policy", to_string(rep.policy)},
               {"r3_tilde", rep.inputs.r3_tilde},
               {"r3_theoretical", rep.r3_theory},
               {"r4_theoretical", rep.r4_theory},
               {"thm1_rate", rep.rates.thm1_rate},
               {"t_grid", est.t_grid}};
    if (rep.warning) {
      b.extra["warning"] = *rep.warning;
      std::cerr << "warning: n=" << n << ": " << *rep.warning << "\n";
    }
    if (rep.simple_bound) rec.add("bound_simple", n, p, *rep.simple_bound);
    const auto d = empirical_dk(est.w_samples, cfg.delta);
    rec.add("dk", n, p, d.dk).extra = {{"dkw_band", d.dkw_band}, {"samples", d.samples}};
  }
}

void run_patterns(const ExperimentConfig& cfg, Recorder& rec) {
  const Anchor anchor = parse_anchor(cfg.anchor);
  const auto classes = enumerate_classes(anchor);
  const std::optional<int> n =
      cfg.n_list.empty() ? std::nullopt : std::optional<int>(cfg.n_list.front());
  std::optional<double> p;
  if (n) p = cfg.p_rule.at(*n);
  auto& csv = rec.out.csv;
  csv.push_back({"class_id", "lemma", "m", "multiplicity_order", "bound_family",
                 "measured_value", "ratio"});
  int id = 0;
  for (const auto& c : classes) {
    ++id;
    auto& r = rec.add("pattern_class", n, p, c.m);
    r.extra = {{"anchor", to_string(anchor)},
               {"class_id", id},
               {"configuration", c.label()},
               {"lemma", to_string(c.lemma_tag)},
               {"m", c.m},
               {"small_p_exponent", c.small_p_exponent()},
               {"multiplicity_order", c.multiplicity_order}};
    std::vector<std::string> row{std::to_string(id), to_string(c.lemma_tag), std::to_string(c.m),
                                 std::to_string(c.multiplicity_order), "NA", "NA", "NA"};
    const bool fits = n && c.representative.v.v[2] < *n && c.representative.w.v[2] < *n &&
                      c.representative.vp.v[2] < *n && c.representative.wp.v[2] < *n;
    if (fits) {
      CovCheckOptions opt;
      opt.mode = cfg.mode == "mc" ? CovMode::MonteCarlo : CovMode::Exact;
      opt.samples = cfg.samples;
      opt.seed = cfg.seed;
      const auto chk = pattern_cov_check(c, *n, *p, cfg.t, opt);
      json kern = json::object();
      for (const auto& k : chk.kernels) {
        kern[k.kernel] = {{"abs_cov", k.abs_cov}, {"std_error", k.std_error},
                          {"lipschitz", k.lipschitz}, {"family", k.family}, {"ratio", k.ratio}};
      }
      r.extra["t"] = cfg.t;
      r.extra["mode"] = cfg.mode;
      r.extra["cov"] = kern;
      std::ostringstream fam, val, rat;
      fam << std::setprecision(10) << chk.kernels[0].family;
      val << std::setprecision(10) << chk.kernels[0].abs_cov;
      rat << std::setprecision(10) << chk.kernels[0].ratio;
      row[4] = fam.str();
      row[5] = val.str();
      row[6] = rat.str();
    }
    csv.push_back(row);
  }
}

void run_rate_fit(const ExperimentConfig& cfg, Recorder& rec) {
  std::ifstream in(cfg.input);
  if (!in) throw ConfigError("rate-fit: cannot open input '" + cfg.input + "'");
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ResultRecord r;
    try {
      r = ResultRecord::from_json(json::parse(line));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("rate-fit: malformed record: ") + e.what());
    }
    if (r.quantity == cfg.quantity && r.n) pts.emplace_back(*r.n, r.value);
  }
  const auto fit = rate_fit(pts);
  json points = json::array();
  for (const auto& [n, v] : pts) points.push_back({n, v});
  rec.add("rate_slope", std::nullopt, std::nullopt, fit.slope).extra = {
      {"source_quantity", cfg.quantity},
      {"intercept", fit.intercept},
      {"r_squared", fit.r_squared},
      {"points", points}};
}

void run_proxy(const ExperimentConfig& cfg, Recorder& rec) {
  const ProxyVariant variant =
      cfg.proxy_variant == "iid" ? ProxyVariant::Iid : ProxyVariant::Literal;
  for (int n : cfg.n_list) {
    const double p = cfg.p_rule.at(n);
    const auto r = proxy_exact(n, p);
    rec.add("proxy_mean_Y", n, p, r.mean_Y);
    rec.add("proxy_var_Y", n, p, r.var_Y);
    rec.add("proxy_var_Y_display", n, p, r.var_Y_display);
    rec.add("proxy_mean_Y_iid", n, p, r.mean_Y_iid);
    rec.add("proxy_var_Y_iid", n, p, r.var_Y_iid);
    rec.add("proxy_gamma", n, p, r.gamma);
    rec.add("proxy_be_bound", n, p, r.be_bound);
    if (cfg.samples > 0) {
      const auto w = sample_proxy_w(n, p, cfg.samples, cfg.seed, variant, cfg.streams);
      const auto d = empirical_dk(w, cfg.delta);
      rec.add("dk", n, p, d.dk).extra = {
          {"dkw_band", d.dkw_band}, {"samples", d.samples}, {"variant", cfg.proxy_variant}};
    }
  }
}

}  // namespace

DkEstimate empirical_dk(std::span<const double> w_samples, double delta) {
  if (w_samples.size() < 2) throw InputError("empirical_dk: need at least two samples");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("empirical_dk: delta must lie in (0,1)");
  std::vector<double> w(w_samples.begin(), w_samples.end());
  std::sort(w.begin(), w.end());
  const double m = static_cast<double>(w.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size();) {
    // Ties form one jump of the empirical distribution function.
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    const double phi = normal_cdf(w[i]);
    worst = std::max({worst, std::abs(static_cast<double>(j) / m - phi),
                      std::abs(static_cast<double>(i) / m - phi)});
    i = j;
  }
  return {worst, std::sqrt(std::log(2.0 / delta) / (2.0 * m)), w.size()};
}

RateFit rate_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw InputError("rate_fit: need at least three points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, d] : points) {
    if (!(n > 0.0) || !(d > 0.0)) throw InputError("rate_fit: values must be positive");
    sx += std::log(n);
    sy += std::log(d);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, d] : points) {
    const double x = std::log(n) - mx, y = std::log(d) - my;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  if (sxx == 0.0) throw InputError("rate_fit: all n are equal");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

std::vector<double> sample_w(int n, double p, std::uint64_t samples, std::uint64_t seed,
                             unsigned streams) {
  const double sigma = exact_moments(n, p).sigma;
  const double mean = exact_moments(n, p).mean_T;
  const SamplerConfig sc{n, p, seed, 0};
  sc.validate();
  std::vector<double> w(samples);
  const std::uint64_t parts = std::max(1u, streams);
  parallel_for(parts, [&](std::uint64_t s) {
    for (std::uint64_t i = s * samples / parts; i < (s + 1) * samples / parts; ++i) {
      w[i] = (static_cast<double>(triangle_count(sample_gnp(sc, i))) - mean) / sigma;
    }
  }, static_cast<unsigned>(parts));
  return w;
}

std::vector<double> sample_proxy_w(int n, double p, std::uint64_t samples, std::uint64_t seed,
                                   ProxyVariant variant, unsigned streams) {
  const auto r = proxy_exact(n, p);
  const double mean = variant == ProxyVariant::Literal ? r.mean_Y : r.mean_Y_iid;
  const double sd = std::sqrt(variant == ProxyVariant::Literal ? r.var_Y : r.var_Y_iid);
  const SamplerConfig sc{n, p, seed, 0};
  sc.validate();
  std::vector<double> w(samples);
  const std::uint64_t parts = std::max(1u, streams);
  parallel_for(parts, [&](std::uint64_t s) {
    for (std::uint64_t i = s * samples / parts; i < (s + 1) * samples / parts; ++i) {
      w[i] = (static_cast<double>(sample_proxy(sc, i, variant)) - mean) / sd;
    }
  }, static_cast<unsigned>(parts));
  return w;
}

PRule PRule::parse(const std::string& text) {
  const std::string s = trim(text);
  PRule r;
  const auto colon = s.find(':');
  const std::string kind = colon == std::string::npos ? "fixed" : s.substr(0, colon);
  const std::string args = colon == std::string::npos ? s : s.substr(colon + 1);
  if (kind == "fixed") {
    r.kind = Kind::Fixed;
    r.value = parse_double("p", args);
    if (!(r.value > 0.0 && r.value < 1.0)) throw ConfigError("p must lie in (0,1), got " + args);
  } else if (kind == "power") {
    r.kind = Kind::Power;
    const auto parts = split(args, ',');
    if (parts.size() == 1) {
      r.c = 1.0;
      r.alpha = parse_double("p", parts[0]);
    } else if (parts.size() == 2) {
      r.c = parse_double("p", parts[0]);
      r.alpha = parse_double("p", parts[1]);
    } else {
      throw ConfigError("power rule expects 'power:alpha' or 'power:c,alpha'");
    }
    if (!(r.c > 0.0) || !(r.alpha >= 0.0)) throw ConfigError("power rule needs c > 0, alpha >= 0");
  } else {
    throw ConfigError("unknown p rule '" + kind + "' (expected fixed or power)");
  }
  return r;
}

double PRule::at(int n) const {
  if (kind == Kind::Fixed) return value;
  constexpr double kEdge = 1e-12;
  const double p = std::clamp(c * std::pow(static_cast<double>(n), -alpha), kEdge, 1.0 - kEdge);
  // n^{1-alpha} lands on 4 up to rounding for e.g. n = 32, alpha = 0.6.
  if (n * p < kPowerGuard * (1.0 - 1e-9)) {
    throw ConfigError("power rule gives n p = " + std::to_string(n * p) + " < 4 at n = " +
                      std::to_string(n));
  }
  return p;
}

std::string PRule::str() const {
  std::ostringstream os;
  os << std::setprecision(17);
  if (kind == Kind::Fixed) {
    os << "fixed:" << value;
  } else {
    os << "power:" << c << "," << alpha;
  }
  return os.str();
}

json ExperimentConfig::to_json() const {
  return json{{"subcommand", subcommand}, {"n", n_list},        {"p", p_rule.str()},
              {"samples", samples},       {"seed", seed},       {"streams", streams},
              {"t_grid", t_grid},         {"delta", delta},     {"anchor", anchor},
              {"mode", mode},             {"t", t},             {"input", input},
              {"quantity", quantity},     {"policy", policy},   {"proxy_variant", proxy_variant}};
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> known{"moments", "bound",    "sample-dk", "oracle",
                                              "coupling", "patterns", "rate-fit",  "proxy"};
  if (std::find(known.begin(), known.end(), subcommand) == known.end()) {
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  }
  const bool needs_n = subcommand != "rate-fit" && subcommand != "patterns";
  if (needs_n && n_list.empty()) throw ConfigError(subcommand + ": --n is required");
  for (int n : n_list) {
    if (n < 3) throw ConfigError("n must be at least 3, got " + std::to_string(n));
    (void)p_rule.at(n);
  }
  if (subcommand == "sample-dk" && samples < 2) throw ConfigError("sample-dk: samples must be >= 2");
  if (subcommand == "rate-fit" && input.empty()) throw ConfigError("rate-fit: --input is required");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  if (streams < 1) throw ConfigError("streams must be at least 1");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ConfigError("t grid entries must be positive");
  }
  if (!(t > 0.0)) throw ConfigError("t must be positive");
  if (mode != "exact" && mode != "mc") throw ConfigError("mode must be exact or mc");
  if (policy != "estimate" && policy != "theoretical") {
    throw ConfigError("policy must be estimate or theoretical");
  }
  if (proxy_variant != "literal" && proxy_variant != "iid") {
    throw ConfigError("proxy-variant must be literal or iid");
  }
  if (subcommand == "patterns") (void)parse_anchor(anchor);
}

Settings read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Settings s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    s[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return s;
}

ExperimentConfig make_config(const std::string& subcommand, const Settings& settings) {
  ExperimentConfig c;
  c.subcommand = subcommand;
  for (const auto& [key, value] : settings) {
    if (key == "n") {
      c.n_list.clear();
      for (const auto& item : split(value, ',')) {
        c.n_list.push_back(static_cast<int>(parse_u64("n", item)));
      }
    } else if (key == "p") {
      c.p_rule = PRule::parse(value);
    } else if (key == "samples") {
      c.samples = parse_u64(key, value);
    } else if (key == "seed") {
      c.seed = parse_u64(key, value);
    } else if (key == "streams") {
      c.streams = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "t-grid") {
      c.t_grid.clear();
      for (const auto& item : split(value, ',')) c.t_grid.push_back(parse_double(key, item));
    } else if (key == "out") {
      c.output = value;
    } else if (key == "csv") {
      c.csv = value;
    } else if (key == "delta") {
      c.delta = parse_double(key, value);
    } else if (key == "anchor") {
      c.anchor = value;
    } else if (key == "mode") {
      c.mode = value;
    } else if (key == "t") {
      c.t = parse_double(key, value);
    } else if (key == "input") {
      c.input = value;
    } else if (key == "quantity") {
      c.quantity = value;
    } else if (key == "policy") {
      c.policy = value;
    } else if (key == "proxy-variant") {
      c.proxy_variant = value;
    } else {
      throw ConfigError("unknown setting '" + key + "'");
    }
  }
  if (c.output.empty()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) {
      c.output = (std::filesystem::path(dir) / (subcommand + ".jsonl")).string();
    }
  }
  c.validate();
  return c;
}

json ResultRecord::to_json() const {
  json j{{"quantity", quantity}};
  j["n"] = n ? json(*n) : json(nullptr);
  j["p"] = p ? json(*p) : json(nullptr);
  j["value"] = value;
  j["std_error"] = std_error ? json(*std_error) : json(nullptr);
  j["regime"] = regime;
  j["extra"] = extra;
  j["config"] = config;
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  return j;
}

ResultRecord ResultRecord::from_json(const json& j) {
  ResultRecord r;
  r.quantity = j.at("quantity").get<std::string>();
  if (!j.at("n").is_null()) r.n = j.at("n").get<int>();
  if (!j.at("p").is_null()) r.p = j.at("p").get<double>();
  r.value = j.at("value").get<double>();
  if (!j.at("std_error").is_null()) r.std_error = j.at("std_error").get<double>();
  r.regime = j.at("regime").get<std::string>();
  r.extra = j.at("extra");
  r.config = j.at("config");
  r.tool_version = j.at("tool_version").get<std::string>();
  r.timestamp = j.value("timestamp", "");
  return r;
}

std::uint64_t ResultRecord::content_hash() const {
  json j = to_json();
  j.erase("timestamp");
  return fnv1a(j.dump());
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

RunOutput run(const ExperimentConfig& cfg) {
  cfg.validate();
  Recorder rec(cfg);
  if (cfg.subcommand == "moments") run_moments(cfg, rec);
  else if (cfg.subcommand == "bound") run_bound(cfg, rec);
  else if (cfg.subcommand == "sample-dk") run_sample_dk(cfg, rec);
  else if (cfg.subcommand == "oracle") run_oracle(cfg, rec);
  else if (cfg.subcommand == "coupling") run_coupling(cfg, rec);
  else if (cfg.subcommand == "patterns") run_patterns(cfg, rec);
  else if (cfg.subcommand == "rate-fit") run_rate_fit(cfg, rec);
  else if (cfg.subcommand == "proxy") run_proxy(cfg, rec);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& r : rec.out.records) h = fnv1a(hex64(r.content_hash()), h);
  rec.out.content_hash = h;
  return std::move(rec.out);
}

void write_output(const ExperimentConfig& cfg, const RunOutput& out) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!cfg.output.empty()) {
    const auto parent = std::filesystem::path(cfg.output).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    file.open(cfg.output, std::ios::app);
    if (!file) throw ConfigError("cannot open output '" + cfg.output + "'");
    os = &file;
  }
  for (const auto& r : out.records) *os << r.to_json().dump() << "\n";
  if (out.csv.empty()) return;
  std::string csv_path = cfg.csv;
  if (csv_path.empty() && !cfg.output.empty()) {
    csv_path = std::filesystem::path(cfg.output).replace_extension(".csv").string();
  }
  if (csv_path.empty()) return;
  std::ofstream c(csv_path, std::ios::app);
  if (!c) throw ConfigError("cannot open CSV output '" + csv_path + "'");
  for (const auto& row : out.csv) {
    for (std::size_t i = 0; i < row.size(); ++i) c << (i ? "," : "") << row[i];
    c << "\n";
  }
}

}  // namespace trinorm
