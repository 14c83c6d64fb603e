#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <utility>

#include "rcr/engine.hpp"
#include "rcr/errors.hpp"
#include "rcr/fieldsim.hpp"
#include "rcr/phi.hpp"
#include "rcr/sample.hpp"
#include "rcr/special.hpp"
#include "rcr/thresholds.hpp"
#include "rcr/weights.hpp"

namespace rcr::cli {
namespace {

std::string num(double x, int digits = 10) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("bad " + what + " '" + text + "'");
  return v;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text)) out.push_back(parse_real(item, what));
  return out;
}

// "0,2,4" or "start:step:stop" (inclusive).
std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 3 && text.find(',') == std::string::npos) {
    const double start = parse_real(parts[0], "grid start");
    const double step = parse_real(parts[1], "grid step");
    const double stop = parse_real(parts[2], "grid stop");
    if (!(step > 0.0) || stop < start) throw UsageError("grid needs step > 0 and stop >= start");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > stop + 1e-9 * step) break;
      out.push_back(v);
    }
    return out;
  }
  auto out = parse_real_list(text, "grid value");
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

std::string join(const std::vector<double>& xs, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? std::string(1, sep) : "") + num(xs[i]);
  return s;
}

template <class T, class F>
std::string join_with(const std::vector<T>& xs, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::string(fmt(xs[i]));
  return s;
}

// `#`-prefixed config block. The replay line lists every resolved option that
// affects the output, so running it regenerates the same bytes.
class Header {
 public:
  explicit Header(std::string command) : command_(std::move(command)) {}

  void add(const std::string& flag, const std::string& value) { items_.emplace_back(flag, value); }
  void add_flag(const std::string& flag) { items_.emplace_back(flag, ""); }
  void note(const std::string& line) { notes_.push_back(line); }

  void write(std::ostream& os) const {
    os << "# rcr " << command_ << "\n";
    for (const auto& n : notes_) os << "# " << n << "\n";
    for (const auto& [k, v] : items_) os << "# " << k << (v.empty() ? "" : "=" + v) << "\n";
    os << "# replay: rcr " << command_;
    for (const auto& [k, v] : items_) os << " --" << k << (v.empty() ? "" : " " + v);
    os << "\n";
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> items_;
  std::vector<std::string> notes_;
};

Sidedness sidedness_for(const Phi& phi) {
  if (phi.kind() == PhiKind::Sup) return Sidedness::One;
  return Sidedness::Two;
}

bool union_bound_applies(const Phi& phi) {
  return phi.kind() != PhiKind::PNorm || phi.p_bound().is_infinite();
}

void check_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericalError(what + " is not finite");
}

// ---------------------------------------------------------------- threshold

struct ThresholdOptions {
  std::string input;
  std::string methods = "bonferroni";
  std::string scheme = "rademacher";
  std::string phi = "supabs";
  double alpha = 0.05;
  double delta = 0.1;
  std::string alphas;
  std::string f_method = "bonferroni";
  double f_level = -1.0;
  std::size_t draws = 1000;
  std::uint64_t exact_cap = 4096;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  bool sigma_plugin = false;
  double bound = -1.0;
  bool lower = false;
  double t_det = std::numeric_limits<double>::quiet_NaN();
  bool mu_null = false;
};

constexpr const char* kThresholdColumns =
    "method,direction,value,alpha,guaranteed_level,delta,n,K,phi,scheme,sigma_norm,sigma_plugin,"
    "A,B,C,D,engine_value,engine_stderr,engine_draws,seed,detail";

void cmd_threshold(const ThresholdOptions& o, unsigned workers, std::ostream& os) {
  std::ifstream in(o.input);
  if (!in) throw UsageError("cannot read sample file '" + o.input + "'");
  const Sample sample = read_sample_csv(in);
  const std::size_t n = sample.size();
  const std::size_t k = sample.dim();
  const Phi phi = Phi::parse(o.phi);
  const WeightScheme scheme = WeightScheme::parse(o.scheme, n);
  const ResamplingConstants constants = scheme_constants(scheme);
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  if (!(o.delta > 0.0 && o.delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");

  std::vector<Method> methods;
  for (const auto& m : split(o.methods)) methods.push_back(parse_method(m));
  if (methods.empty()) throw UsageError("--method is empty");

  std::vector<double> sigma;
  if (o.sigma_plugin) {
    sigma = coordinate_std(sample);
  } else {
    if (!(o.sigma >= 0.0)) throw UsageError("--sigma must be >= 0");
    sigma.assign(k, o.sigma);
  }
  const double sigma_inf = p_norm(sigma, Exponent::infinity());
  const double sigma_p = p_norm(sigma, phi.p_bound());

  EngineConfig cfg = o.draws == 0 ? EngineConfig::exact(o.exact_cap) : EngineConfig::monte_carlo(o.draws, o.seed);
  cfg.seed = o.seed;
  cfg.workers = workers;

  std::vector<double> alphas = o.alphas.empty() ? std::vector<double>{0.9 * o.alpha}
                                                : parse_real_list(o.alphas, "--alphas entry");
  const double chain_used = std::accumulate(alphas.begin(), alphas.end(), 0.0);
  const double f_level = o.f_level >= 0.0 ? o.f_level : o.alpha - chain_used;

  Header header("threshold");
  header.note("columns: " + std::string(kThresholdColumns) + (o.mu_null ? ",rejected" : ""));
  header.note("n=" + std::to_string(n) + " K=" + std::to_string(k));
  header.add("input", o.input);
  header.add("method", o.methods);
  header.add("scheme", scheme.name());
  header.add("phi", phi.name());
  header.add("alpha", num(o.alpha));
  header.add("delta", num(o.delta));
  header.add("alphas", join(alphas));
  header.add("f-method", o.f_method);
  header.add("f-level", num(f_level));
  header.add("draws", std::to_string(o.draws));
  header.add("exact-cap", std::to_string(o.exact_cap));
  header.add("seed", std::to_string(o.seed));
  if (o.sigma_plugin) {
    header.add_flag("sigma-plugin");
  } else {
    header.add("sigma", num(o.sigma));
  }
  if (o.bound > 0.0) header.add("bound", num(o.bound));
  if (o.lower) header.add_flag("lower");
  if (!std::isnan(o.t_det)) header.add("t-det", num(o.t_det));
  if (o.mu_null) header.add_flag("mu-null");

  // Resampled expectations are computed lazily and shared between methods.
  std::optional<EngineResult> e_phi;
  std::optional<EngineResult> e_tilde;
  auto expectation = [&](const Phi& p, std::optional<EngineResult>& slot) -> const EngineResult& {
    if (!slot) slot = resampled_expectation(sample, scheme, p, cfg);
    return *slot;
  };

  const MeanVector mean = empirical_mean(sample);
  std::vector<std::pair<ThresholdReport, std::string>> rows;  // report, direction
  auto push = [&](ThresholdReport r, const std::string& direction) {
    r.dim = k;
    r.sigma_plugin = o.sigma_plugin;
    if (r.scheme.empty() && (r.constants || r.method == Method::QuantileChain)) r.scheme = scheme.name();
    if (r.constants) r.engine_seed = cfg.mode == EngineMode::Exact ? 0 : o.seed;
    check_finite(r.value, std::string(to_string(r.method)) + " threshold");
    rows.emplace_back(std::move(r), direction);
  };

  for (Method m : methods) {
    switch (m) {
      case Method::Bonferroni:
      case Method::SingleTest: {
        if (!union_bound_applies(phi)) {
          throw UsageError(std::string(to_string(m)) + " needs phi = sup, supabs or pnorm:inf");
        }
        auto r = m == Method::Bonferroni ? bonferroni_threshold(sigma_inf, n, k, o.alpha, sidedness_for(phi))
                                         : single_test_threshold(sigma_inf, n, o.alpha, sidedness_for(phi));
        push(std::move(r), "upper");
        break;
      }
      case Method::ConcGaussian: {
        const auto& e = expectation(phi, e_phi);
        push(conc_gaussian_threshold(e, constants, sigma_p, n, o.alpha, Deviation::Upper), "upper");
        if (o.lower) push(conc_gaussian_threshold(e, constants, sigma_p, n, o.alpha, Deviation::Lower), "lower");
        break;
      }
      case Method::ConcBounded: {
        if (!(o.bound > 0.0)) throw UsageError("conc_bounded needs --bound M > 0");
        if (o.lower && !constants.d) {
          throw UsageError("D_W undefined for " + std::string(scheme.kind() == SchemeKind::Efron ? "Efron" : scheme.name()) +
                           " weights; no lower bounded threshold");
        }
        const auto& e = expectation(phi, e_phi);
        auto t = conc_bounded_thresholds(e, constants, BoundedAssumption{o.bound, phi.p_bound()}, n, o.alpha);
        push(t.upper, "upper");
        if (o.lower) push(*t.lower, "lower");
        break;
      }
      case Method::Compound: {
        double t_det = o.t_det;
        if (std::isnan(t_det)) {
          if (!union_bound_applies(phi)) throw UsageError("compound with phi = " + phi.name() + " needs --t-det");
          t_det = bonferroni_threshold(sigma_inf, n, k, o.alpha * (1.0 - o.delta), sidedness_for(phi)).value;
        }
        const auto& e = expectation(phi, e_phi);
        push(compound_threshold(e, constants, sigma_p, n, o.alpha, o.delta, t_det), "upper");
        break;
      }
      case Method::QuantileChain: {
        if (scheme.kind() != SchemeKind::Rademacher) throw UsageError("quantile_chain needs --scheme rademacher");
        const Phi tilde = phi.symmetrized();
        double f = 0.0;
        if (f_level > 0.0) {
          if (o.f_method == "bonferroni") {
            if (!union_bound_applies(tilde)) throw UsageError("f-method bonferroni needs phi = sup or supabs");
            f = bonferroni_threshold(sigma_inf, n, k, f_level, Sidedness::Two).value;
          } else if (o.f_method == "conc") {
            const auto& e = expectation(tilde, e_tilde);
            f = std::max(0.0, conc_gaussian_threshold(e, constants, p_norm(sigma, tilde.p_bound()), n, f_level,
                                                      Deviation::Upper)
                                  .value);
          } else {
            throw UsageError("--f-method must be bonferroni or conc");
          }
        } else if (f_level < 0.0) {
          throw UsageError("level split exceeds alpha (sum of --alphas = " + num(chain_used) + ")");
        } else {
          throw UsageError("the trailing term needs a positive level (--f-level)");
        }
        LevelSpec levels{o.alpha, o.delta, alphas};
        push(quantile_chain_threshold(sample, phi, levels, f, f_level, cfg), "upper");
        break;
      }
    }
  }

  header.write(os);
  os << kThresholdColumns << (o.mu_null ? ",rejected" : "") << "\n";
  for (const auto& [r, direction] : rows) {
    const auto& c = r.constants;
    os << to_string(r.method) << ',' << direction << ',' << num(r.value) << ',' << num(r.level.alpha) << ','
       << num(r.guaranteed_level) << ',' << (r.method == Method::Compound || r.method == Method::QuantileChain ? num(r.level.delta) : "")
       << ',' << r.n << ',' << r.dim << ',' << phi.name() << ',' << r.scheme << ',' << num(r.sigma_norm) << ','
       << (r.sigma_plugin ? 1 : 0) << ',' << (c ? num(c->a.value) : "") << ',' << (c ? num(c->b.value) : "") << ','
       << (c ? num(c->c.value) : "") << ',' << (c && c->d ? num(c->d->value) : "") << ','
       << (r.engine_draws ? num(r.engine_value) : "") << ',' << (r.engine_draws ? num(r.engine_std_error) : "") << ','
       << r.engine_draws << ',' << (r.engine_draws ? std::to_string(r.engine_seed) : "") << ',' << r.detail;
    if (o.mu_null) {
      os << ',';
      if (direction == "upper") {
        const auto rejected = reject_set(mean, r.value, sidedness_for(phi));
        for (std::size_t i = 0; i < rejected.size(); ++i) os << (i ? ";" : "") << rejected[i];
      }
    }
    os << "\n";
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string profile = "desk";
  std::size_t m = 0;
  std::size_t n = 0;
  std::string b_grid;
  std::size_t reps = 0;
  std::size_t draws = 0;
  std::size_t oracle_samples = 1000;
  double alpha = 0.05;
  double delta = 0.1;
  std::string methods;
  std::uint64_t seed = 1;
};

constexpr const char* kSimulateColumns = "b,method,mean,sd,engine_stderr,engine_draws,seed";

void cmd_simulate(SimulateOptions o, unsigned workers, std::ostream& os) {
  Header header("simulate");
  if (o.profile == "desk") {
    if (o.m == 0) o.m = 16;
    if (o.n == 0) o.n = 100;
    if (o.b_grid.empty()) o.b_grid = "0:2:12";
    if (o.reps == 0) o.reps = 10;
    if (o.draws == 0) o.draws = 1000;
  } else if (o.profile == "paper") {
    if (o.m == 0) o.m = 128;
    if (o.n == 0) o.n = 1000;
    if (o.b_grid.empty()) o.b_grid = "0:2:40";
    if (o.reps == 0) o.reps = 50;
    if (o.draws == 0) o.draws = 1000;
    header.note("reference setting: K=128^2=16384 pixels, n=1000 fields per sample, even b in [0,40],");
    header.note("alpha=0.05, 50 replications per point, 1000 Rademacher Monte Carlo draws,");
    header.note("J=1, alpha_0=0.9 alpha, delta=0.1, f at level 0.1 alpha, true quantile from 1000 samples");
  } else {
    throw UsageError("--profile must be desk or paper");
  }
  if (!is_power_of_two(o.m) || o.m < 2) throw UsageError("--m must be a power of two >= 2");
  if (o.n < 2) throw UsageError("--n must be at least 2");

  ExperimentGrid grid;
  grid.bandwidths = parse_grid(o.b_grid);
  grid.replications = o.reps;
  grid.oracle_samples = o.oracle_samples;
  grid.settings.alpha = o.alpha;
  grid.settings.delta = o.delta;
  grid.settings.draws = o.draws;
  grid.settings.sided = Sidedness::Two;
  grid.workers = workers;
  if (!o.methods.empty()) {
    grid.methods.clear();
    for (const auto& m : split(o.methods)) grid.methods.push_back(parse_sim_method(m));
  }
  TorusFieldConfig config;
  config.side = o.m;
  config.n = o.n;
  config.seed = o.seed;

  header.note("columns: " + std::string(kSimulateColumns));
  header.note("phi = supabs (two-sided); sigma = 1 known; K = m^2 = " + std::to_string(o.m * o.m));
  header.add("profile", o.profile);
  header.add("m", std::to_string(o.m));
  header.add("n", std::to_string(o.n));
  header.add("b-grid", join(grid.bandwidths));
  header.add("reps", std::to_string(o.reps));
  header.add("draws", std::to_string(o.draws));
  header.add("oracle-samples", std::to_string(o.oracle_samples));
  header.add("alpha", num(o.alpha));
  header.add("delta", num(o.delta));
  header.add("methods", join_with(grid.methods, [](SimMethod m) { return to_string(m); }));
  header.add("seed", std::to_string(o.seed));

  const auto rows = run_threshold_comparison(grid, config);
  header.write(os);
  os << kSimulateColumns << "\n";
  for (const auto& r : rows) {
    check_finite(r.mean, "simulated threshold");
    os << num(r.bandwidth) << ',' << to_string(r.method) << ',' << num(r.mean) << ',' << num(r.sd) << ','
       << num(r.engine_std_error) << ',' << r.engine_draws << ',' << r.seed << "\n";
  }
}

// ---------------------------------------------------------------- fwer

struct FwerOptions {
  std::size_t m = 16;
  std::size_t n = 100;
  double b = 0.0;
  double alpha = 0.05;
  double delta = 0.1;
  std::size_t trials = 1000;
  std::size_t draws = 200;
  std::string methods = "bonferroni,single_test,conc,compound,quant_bonf,quant_conc";
  double mu = 0.0;
  std::string mu_file;
  std::string sided = "two";
  std::uint64_t seed = 1;
};

constexpr const char* kFwerColumns = "method,b,m,n,trials,alpha,rate,stderr,exceedance,exceedance_stderr,seed";

void cmd_fwer(const FwerOptions& o, unsigned workers, std::ostream& os) {
  if (!is_power_of_two(o.m) || o.m < 2) throw UsageError("--m must be a power of two >= 2");
  TorusFieldConfig config;
  config.side = o.m;
  config.bandwidth = o.b;
  config.n = o.n;
  config.seed = o.seed;
  const std::size_t k = config.dim();

  MeanVector mu(k, o.mu);
  if (!o.mu_file.empty()) {
    std::ifstream in(o.mu_file);
    if (!in) throw UsageError("cannot read mean file '" + o.mu_file + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (char& c : text) {
      if (c == '\n' || c == '\r' || c == ' ') c = ',';
    }
    mu = parse_real_list(text, "mean entry");
    if (mu.size() != k) throw UsageError("mean file has " + std::to_string(mu.size()) + " values, expected K = " + std::to_string(k));
  }

  ThresholdSettings settings;
  settings.alpha = o.alpha;
  settings.delta = o.delta;
  settings.draws = o.draws;
  if (o.sided == "two") {
    settings.sided = Sidedness::Two;
  } else if (o.sided == "one") {
    settings.sided = Sidedness::One;
  } else {
    throw UsageError("--sided must be one or two");
  }
  std::vector<SimMethod> methods;
  for (const auto& m : split(o.methods)) methods.push_back(parse_sim_method(m));

  Header header("fwer");
  header.note("columns: " + std::string(kFwerColumns));
  header.note(settings.sided == Sidedness::Two ? "null set {k : mu_k = 0}, reject |Ybar_k| > t"
                                               : "null set {k : mu_k <= 0}, reject Ybar_k > t");
  header.add("m", std::to_string(o.m));
  header.add("n", std::to_string(o.n));
  header.add("b", num(o.b));
  header.add("alpha", num(o.alpha));
  header.add("delta", num(o.delta));
  header.add("trials", std::to_string(o.trials));
  header.add("draws", std::to_string(o.draws));
  header.add("methods", join_with(methods, [](SimMethod m) { return to_string(m); }));
  if (o.mu_file.empty()) {
    header.add("mu", num(o.mu));
  } else {
    header.add("mu-file", o.mu_file);
  }
  header.add("sided", o.sided);
  header.add("seed", std::to_string(o.seed));

  const auto estimates = estimate_fwer(config, mu, methods, settings, o.trials, workers);
  header.write(os);
  os << kFwerColumns << "\n";
  for (const auto& e : estimates) {
    os << to_string(e.method) << ',' << num(o.b) << ',' << o.m << ',' << o.n << ',' << e.trials << ',' << num(o.alpha)
       << ',' << num(e.rate) << ',' << num(e.std_error) << ',' << num(e.exceedance) << ','
       << num(e.exceedance_std_error) << ',' << o.seed << "\n";
  }
}

// ---------------------------------------------------------------- constants

struct ConstantsOptions {
  std::string schemes = "all";
  std::size_t n = 10;
  std::size_t draws = 0;
  std::uint64_t seed = 1;
};

constexpr const char* kConstantsColumns =
    "scheme,n,A,B,C,D,A_kind,B_kind,C_kind,D_kind,B_lower,B_upper,accuracy_C_over_B,complexity";

void cmd_constants(const ConstantsOptions& o, std::ostream& os) {
  std::vector<std::string> names = split(o.schemes);
  if (o.schemes == "all") {
    names = {"rademacher", "efron", "loo"};
    if (o.n % 2 == 0) names.insert(names.begin() + 2, "rho");
    for (std::size_t v = 2; v <= std::min<std::size_t>(o.n, 10); ++v) {
      if (o.n % v == 0) names.push_back("vfold:" + std::to_string(v));
    }
  }
  std::vector<WeightScheme> schemes;
  for (const auto& s : names) schemes.push_back(WeightScheme::parse(s, o.n));
  if (schemes.empty()) throw UsageError("--scheme is empty");
  if (o.draws != 0 && o.draws < 100) throw UsageError("--draws must be 0 or at least 100");

  Header header("constants");
  header.note("columns: " + std::string(kConstantsColumns));
  header.note("kinds: exact, bounds (value is the conservative end), monte_carlo");
  header.add("scheme", o.schemes);
  header.add("n", std::to_string(o.n));
  header.add("draws", std::to_string(o.draws));
  header.add("seed", std::to_string(o.seed));
  header.write(os);
  os << kConstantsColumns << "\n";
  for (const auto& s : schemes) {
    ResamplingConstants c = scheme_constants(s);
    if (o.draws > 0) c = refine_constants_mc(s, c, o.draws, o.seed);
    os << s.name() << ',' << s.n() << ',' << num(c.a.value, 6) << ',' << num(c.b.value, 6) << ','
       << num(c.c.value, 6) << ',' << (c.d ? num(c.d->value, 6) : "NA") << ',' << to_string(c.a.exactness) << ','
       << to_string(c.b.exactness) << ',' << to_string(c.c.exactness) << ','
       << (c.d ? to_string(c.d->exactness) : "NA") << ',' << num(c.b.lower, 6) << ',' << num(c.b.upper, 6) << ','
       << num(c.accuracy_index(), 6) << ',' << s.complexity_label() << "\n";
  }
}

// Writes to --out when set, otherwise to `out`. The file is only created once
// the command has succeeded.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& produce) {
  if (path.empty()) {
    produce(out);
    return;
  }
  std::ostringstream buffer;
  produce(buffer);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write '" + path + "'");
  file << buffer.str();
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resampling-based confidence thresholds for the mean of a correlated random vector"};
  app.name("rcr");
  app.require_subcommand(1);
  std::string out_path;
  unsigned workers = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Write the CSV here instead of stdout");
    sub->add_option("--workers", workers, "Worker threads (0 = all cores); output does not depend on it");
  };

  ThresholdOptions th;
  auto* threshold = app.add_subcommand("threshold", "Thresholds for a sample CSV (one row per coordinate)");
  threshold->add_option("--input", th.input, "Sample CSV: K rows of n comma-separated values")->required();
  threshold->add_option("--method", th.methods,
                        "Comma list of bonferroni,single_test,conc_gaussian,conc_bounded,compound,quantile_chain");
  threshold->add_option("--scheme", th.scheme, "rademacher | efron | rho:<q> | rho | loo | vfold:<V>");
  threshold->add_option("--phi", th.phi, "sup | supabs | pnorm:<p> | pnorm:inf");
  threshold->add_option("--alpha", th.alpha, "Overall level");
  threshold->add_option("--delta", th.delta, "Split parameter for compound and quantile_chain");
  threshold->add_option("--alphas", th.alphas, "Quantile-chain levels alpha_0,...,alpha_{J-1} (default 0.9 alpha)");
  threshold->add_option("--f-method", th.f_method, "Trailing bound of the chain: bonferroni | conc");
  threshold->add_option("--f-level", th.f_level, "Level of the trailing bound (default alpha - sum alphas)");
  threshold->add_option("--draws", th.draws, "Monte Carlo draws; 0 enumerates the weight law exactly");
  threshold->add_option("--exact-cap", th.exact_cap, "Largest support enumerated when --draws 0");
  threshold->add_option("--seed", th.seed, "Master seed");
  threshold->add_option("--sigma", th.sigma, "Known bound on every coordinate's standard deviation");
  threshold->add_flag("--sigma-plugin", th.sigma_plugin, "Estimate sigma from the data (flagged in the output)");
  threshold->add_option("--bound", th.bound, "M in ||Y - mu||_p <= M, for conc_bounded");
  threshold->add_flag("--lower", th.lower, "Also emit lower-deviation thresholds");
  threshold->add_option("--t-det", th.t_det, "Deterministic reference threshold for compound");
  threshold->add_flag("--mu-null", th.mu_null, "Append the rejection set of H0: mu_k = 0 (mu_k <= 0 for sup)");
  threshold->footer(std::string("Output columns: ") + kThresholdColumns + "[,rejected]");
  add_common(threshold);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Threshold comparison on stationary Gaussian torus fields");
  simulate->add_option("--profile", sim.profile, "desk | paper (defaults for the options below)");
  simulate->add_option("--m", sim.m, "Torus side (power of two); K = m^2");
  simulate->add_option("--n", sim.n, "Fields per sample");
  simulate->add_option("--b-grid", sim.b_grid, "Bandwidths: list '0,4,8' or range 'start:step:stop'");
  simulate->add_option("--reps", sim.reps, "Replications per bandwidth");
  simulate->add_option("--draws", sim.draws, "Rademacher Monte Carlo draws per sample");
  simulate->add_option("--oracle-samples", sim.oracle_samples, "Samples for the true-quantile reference");
  simulate->add_option("--alpha", sim.alpha, "Overall level");
  simulate->add_option("--delta", sim.delta, "Split parameter");
  simulate->add_option("--methods", sim.methods,
                       "Comma list of bonferroni,single_test,conc,compound,quant_bonf,quant_conc,oracle_quantile");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->footer(std::string("Output columns: ") + kSimulateColumns);
  add_common(simulate);

  FwerOptions fw;
  auto* fwer = app.add_subcommand("fwer", "Family-wise error rate of each method by simulation");
  fwer->add_option("--m", fw.m, "Torus side (power of two)");
  fwer->add_option("--n", fw.n, "Fields per sample");
  fwer->add_option("--b", fw.b, "Filter bandwidth");
  fwer->add_option("--alpha", fw.alpha, "Overall level");
  fwer->add_option("--delta", fw.delta, "Split parameter");
  fwer->add_option("--trials", fw.trials, "Simulated samples (>= 100)");
  fwer->add_option("--draws", fw.draws, "Rademacher Monte Carlo draws per sample");
  fwer->add_option("--methods", fw.methods, "Comma list of simulation methods");
  fwer->add_option("--mu", fw.mu, "Constant mean for every pixel");
  fwer->add_option("--mu-file", fw.mu_file, "File with K mean values (comma or newline separated)");
  fwer->add_option("--sided", fw.sided, "two (H0: mu_k = 0) | one (H0: mu_k <= 0)");
  fwer->add_option("--seed", fw.seed, "Master seed");
  fwer->footer(std::string("Output columns: ") + kFwerColumns);
  add_common(fwer);

  ConstantsOptions co;
  auto* constants = app.add_subcommand("constants", "Resampling constants A, B, C, D with accuracy and complexity");
  constants->add_option("--scheme", co.schemes, "Comma list of schemes, or 'all'");
  constants->add_option("--n", co.n, "Sample size");
  constants->add_option("--draws", co.draws, "Monte Carlo refinement of bounded constants (0 = none)");
  constants->add_option("--seed", co.seed, "Seed for the refinement");
  constants->footer(std::string("Output columns: ") + kConstantsColumns);
  add_common(constants);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name());
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "rcr: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*threshold) {
      emit(out_path, out, [&](std::ostream& os) { cmd_threshold(th, workers, os); });
    } else if (*simulate) {
      emit(out_path, out, [&](std::ostream& os) { cmd_simulate(sim, workers, os); });
    } else if (*fwer) {
      emit(out_path, out, [&](std::ostream& os) { cmd_fwer(fw, workers, os); });
    } else if (*constants) {
      emit(out_path, out, [&](std::ostream& os) { cmd_constants(co, os); });
    }
  } catch (const CsvError& e) {
    err << "rcr: malformed sample CSV, " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "rcr: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "rcr: numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> copy = args;
  std::vector<char*> argv;
  argv.reserve(copy.size());
  for (auto& a : copy) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rcr::cli
