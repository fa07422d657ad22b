#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "distbeam/algebra_check.hpp"
#include "distbeam/beam.hpp"
#include "distbeam/errors.hpp"

namespace {

using namespace distbeam;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every flag is optional so that config-file values can fill the gaps.
struct Flags {
  std::optional<std::string> bc;
  std::optional<double> k, lambda0, lambda1, xi0, A, m;
  std::optional<int> n_modes;
  std::optional<double> alpha_max, grid_step, tol;
  std::optional<std::string> param;
  std::optional<double> start, stop;
  std::optional<int> count;
  std::optional<double> alpha;
  std::optional<int> mode_index;
  std::optional<int> samples;
  std::optional<double> alpha_perturb;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::string config;
  bool verbose = false;
};

struct RunConfig {
  std::string bc = "pp";
  double k = 1.0, lambda0 = 0.0, lambda1 = 0.0, xi0 = 0.5, A = 1.0, m = 1.0;
  int n_modes = 3;
  double alpha_max = 25.0, grid_step = 0.01, tol = 1e-12;
  std::string param = "lambda";
  double start = 0.0, stop = 10.0;
  int count = 11;
  std::optional<double> alpha;
  int mode_index = 1;
  int samples = 1001;
  double alpha_perturb = 0.0;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string out;
};

template <typename T>
void take(T& dst, const std::optional<T>& flag, const json& cfg, const char* key) {
  if (flag) {
    dst = *flag;
  } else if (cfg.contains(key)) {
    try {
      dst = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
      throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

template <typename T>
void take(std::optional<T>& dst, const std::optional<T>& flag, const json& cfg, const char* key) {
  T v{};
  bool set = cfg.contains(key) || flag.has_value();
  take(v, flag, cfg, key);
  if (set) dst = v;
}

json read_config(const std::string& path) {
  if (path.empty()) {
    return json::object();
  }
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open config file " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) {
    throw UsageError("config file must hold a flat JSON object");
  }
  static const std::set<std::string> known{
      "bc",    "k",     "lambda0", "lambda1", "xi0",        "A",       "m",       "n_modes",
      "alpha_max", "grid_step", "tol", "param", "start",     "stop",    "count",   "alpha",
      "mode_index", "samples", "alpha_perturb", "threads", "out"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
  return j;
}

RunConfig resolve(const Flags& f) {
  const json cfg = read_config(f.config);
  RunConfig c;
  take(c.bc, f.bc, cfg, "bc");
  take(c.k, f.k, cfg, "k");
  take(c.lambda0, f.lambda0, cfg, "lambda0");
  take(c.lambda1, f.lambda1, cfg, "lambda1");
  take(c.xi0, f.xi0, cfg, "xi0");
  take(c.A, f.A, cfg, "A");
  take(c.m, f.m, cfg, "m");
  take(c.n_modes, f.n_modes, cfg, "n_modes");
  take(c.alpha_max, f.alpha_max, cfg, "alpha_max");
  take(c.grid_step, f.grid_step, cfg, "grid_step");
  take(c.tol, f.tol, cfg, "tol");
  take(c.param, f.param, cfg, "param");
  take(c.start, f.start, cfg, "start");
  take(c.stop, f.stop, cfg, "stop");
  take(c.count, f.count, cfg, "count");
  take(c.alpha, f.alpha, cfg, "alpha");
  take(c.mode_index, f.mode_index, cfg, "mode_index");
  take(c.samples, f.samples, cfg, "samples");
  take(c.alpha_perturb, f.alpha_perturb, cfg, "alpha_perturb");
  take(c.threads, f.threads, cfg, "threads");
  take(c.out, f.out, cfg, "out");
  return c;
}

json to_json(const RunConfig& c) {
  json j{{"bc", c.bc},       {"k", c.k},           {"lambda0", c.lambda0},     {"lambda1", c.lambda1},
         {"xi0", c.xi0},     {"A", c.A},           {"m", c.m},                 {"n_modes", c.n_modes},
         {"alpha_max", c.alpha_max}, {"grid_step", c.grid_step}, {"tol", c.tol}, {"param", c.param},
         {"start", c.start}, {"stop", c.stop},     {"count", c.count},         {"mode_index", c.mode_index},
         {"samples", c.samples}, {"alpha_perturb", c.alpha_perturb}, {"threads", c.threads}, {"out", c.out}};
  if (c.alpha) j["alpha"] = *c.alpha;
  return j;
}

beam::BeamModel model_of(const RunConfig& c) {
  beam::BeamModel bm;
  if (c.bc == "pp") {
    bm.bc = beam::BoundaryKind::PinnedPinned;
  } else if (c.bc == "cc") {
    bm.bc = beam::BoundaryKind::ClampedClamped;
  } else {
    throw UsageError("bc must be 'pp' or 'cc'");
  }
  bm.stiffness = c.A;
  bm.ratio = c.k;
  bm.mass = c.m;
  bm.xi0 = c.xi0;
  bm.lambda0 = c.lambda0;
  bm.lambda1 = c.lambda1;
  try {
    beam::validate(bm);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  return bm;
}

beam::SearchOptions search_of(const RunConfig& c) {
  if (c.n_modes < 1) throw UsageError("n_modes must be at least 1");
  if (!(c.grid_step > 0.0)) throw UsageError("grid_step must be positive");
  if (!(c.alpha_max > c.grid_step)) throw UsageError("alpha_max must exceed grid_step");
  if (!(c.tol > 0.0)) throw UsageError("tol must be positive");
  return beam::SearchOptions{c.n_modes, c.alpha_max, c.grid_step, c.tol};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_freq(const RunConfig& c) {
  const beam::BeamModel bm = model_of(c);
  const beam::SearchOptions opts = search_of(c);
  Output out(c.out);
  std::vector<double> alphas;
  int rc = kExitOk;
  try {
    alphas = beam::find_frequencies(bm, opts);
  } catch (const FrequencyShortfall& e) {
    alphas = e.found();
    std::cerr << "error: " << e.what() << "\n";
    rc = kExitNumeric;
  }
  auto& os = out.stream();
  os << "mode_index,alpha,omega\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    os << (i + 1) << ',' << num(alphas[i]) << ',' << num(beam::alpha_to_omega(bm, alphas[i])) << '\n';
  }
  return rc;
}

int cmd_sweep(const RunConfig& c) {
  const auto p = beam::parse_sweep_param(c.param);
  if (!p) throw UsageError("param must be one of lambda, k, xi0");
  if (c.count < 1) throw UsageError("count must be at least 1");
  beam::SweepSpec spec;
  spec.varying = *p;
  spec.base = model_of(c);
  spec.search = search_of(c);
  for (int i = 0; i < c.count; ++i) {
    spec.grid.push_back(c.count == 1 ? c.start : c.start + (c.stop - c.start) * i / (c.count - 1));
  }
  for (double v : spec.grid) {
    try {
      beam::validate(beam::apply_sweep_value(spec.base, spec.varying, v));
    } catch (const InvalidInput& e) {
      throw UsageError(std::string("sweep value ") + num(v) + ": " + e.what());
    }
  }
  const unsigned threads = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  const std::vector<beam::SweepRow> rows = beam::sweep(spec, threads);

  Output out(c.out);
  auto& os = out.stream();
  os << "param,value";
  for (int i = 1; i <= c.n_modes; ++i) os << ",alpha" << i;
  os << '\n';
  for (const beam::SweepRow& r : rows) {
    os << c.param << ',' << num(r.value);
    for (const auto& a : r.alphas) {
      os << ',';
      if (a) os << num(*a);
    }
    os << '\n';
    if (r.flagged) {
      std::cerr << "note: " << c.param << "=" << num(r.value) << ": " << r.note << "\n";
    }
  }
  return kExitOk;
}

int cmd_shape(const RunConfig& c) {
  const beam::BeamModel bm = model_of(c);
  if (c.samples < 2) throw UsageError("samples must be at least 2");
  double alpha = 0.0;
  if (c.alpha) {
    if (!(*c.alpha > 0.0)) throw UsageError("alpha must be positive");
    alpha = *c.alpha;
  } else {
    if (c.mode_index < 1) throw UsageError("mode_index must be at least 1");
    beam::SearchOptions opts = search_of(c);
    opts.n_modes = c.mode_index;
    alpha = beam::find_frequencies(bm, opts).back();
  }
  const beam::Mode mode = beam::mode_shape(bm, alpha);
  Output out(c.out);
  auto& os = out.stream();
  os << "x,phi\n";
  for (int i = 0; i < c.samples; ++i) {
    const double x = static_cast<double>(i) / (c.samples - 1);
    os << num(x) << ',' << num(beam::eval_mode(mode, bm, x)) << '\n';
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& c) {
  const beam::BeamModel bm = model_of(c);
  const std::vector<double> alphas = beam::find_frequencies(bm, search_of(c));
  Output out(c.out);
  auto& os = out.stream();
  bool all_ok = true;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double alpha = alphas[i] + c.alpha_perturb;
    const beam::Mode mode = (c.alpha_perturb == 0.0) ? beam::mode_shape(bm, alpha) : beam::relaxed_mode(bm, alpha);
    const auto [left, right] = beam::mode_pieces(mode);
    const auto rep = interface::residual_check(left, right, beam::to_coeffset(bm, beam::alpha_to_omega(bm, alpha)));
    const Eigen::Vector4d ir = beam::interface_residual(mode, bm);
    const bool ok = rep.passed();
    all_ok = all_ok && ok;
    os << "mode " << (i + 1) << " alpha=" << num(alpha) << " " << (ok ? "PASS" : "FAIL") << "\n";
    for (const auto& [order, coeff] : rep.delta_coeffs) {
      os << "  delta" << order << " " << num(coeff) << "\n";
    }
    os << "  smooth_residual_max " << num(rep.smooth_residual_max) << "\n";
    os << "  scale " << num(rep.scale) << " tolerance " << num(1e-6 * rep.scale) << "\n";
    os << "  interface_residual_max " << num(ir.cwiseAbs().maxCoeff()) << "\n";
  }
  os << (all_ok ? "all modes pass\n" : "verification failed\n");
  return all_ok ? kExitOk : kExitNumeric;
}

int cmd_algebra_check(const RunConfig& c) {
  Output out(c.out);
  auto& os = out.stream();
  const check::SuiteReport ids = check::run_identity_checks();
  const check::SuiteReport props = check::run_property_checks();
  os << check::format_report(ids) << check::format_report(props);
  const int cases = ids.total_cases() + props.total_cases();
  const int failures = ids.total_failures() + props.total_failures();
  os << "passed " << (cases - failures) << "/" << cases << "\n";
  return failures == 0 ? kExitOk : kExitNumeric;
}

void add_model_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--bc", f.bc, "Boundary conditions: pp or cc");
  sub->add_option("--k", f.k, "Stiffness ratio (right/left)");
  sub->add_option("--lambda0", f.lambda0, "Crack intensity, left side");
  sub->add_option("--lambda1", f.lambda1, "Crack intensity, right side");
  sub->add_option("--xi0", f.xi0, "Crack position in (0, 1)");
  sub->add_option("--A", f.A, "Flexural stiffness of the left part");
  sub->add_option("--m", f.m, "Mass per unit length");
  sub->add_option("--n-modes", f.n_modes, "Number of modes");
  sub->add_option("--alpha-max", f.alpha_max, "Upper end of the frequency scan");
  sub->add_option("--grid-step", f.grid_step, "Scan step in alpha");
  sub->add_option("--tol", f.tol, "Bisection tolerance on alpha");
}

void add_common_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Flat JSON object with the same keys (underscores)");
  sub->add_option("--out", f.out, "Output file (default stdout)");
  sub->add_flag("--verbose", f.verbose, "Echo the effective configuration to stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vibration modes of stepped Euler-Bernoulli beams with a crack"};
  app.require_subcommand(1);
  Flags f;

  auto* freq = app.add_subcommand("freq", "First n frequency parameters");
  auto* sweep = app.add_subcommand("sweep", "Frequencies over a parameter grid");
  auto* shape = app.add_subcommand("shape", "Sampled mode shape");
  auto* verify = app.add_subcommand("verify", "Distributional residual of every mode");
  auto* algebra = app.add_subcommand("algebra-check", "Identity and property suite of the product");
  for (auto* sub : {freq, sweep, shape, verify}) add_model_flags(sub, f);
  for (auto* sub : {freq, sweep, shape, verify, algebra}) add_common_flags(sub, f);
  sweep->add_option("--param", f.param, "lambda (sets lambda0 = lambda1), k or xi0");
  sweep->add_option("--start", f.start, "First grid value");
  sweep->add_option("--stop", f.stop, "Last grid value");
  sweep->add_option("--count", f.count, "Number of grid values");
  sweep->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  shape->add_option("--alpha", f.alpha, "Frequency parameter of the mode");
  shape->add_option("--mode-index", f.mode_index, "Mode number when --alpha is absent");
  shape->add_option("--samples", f.samples, "Number of uniform samples on [0, 1]");
  verify->add_option("--alpha-perturb", f.alpha_perturb, "Shift every alpha before checking");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = resolve(f);
    if (f.verbose) {
      std::cerr << to_json(cfg).dump() << "\n";
    }
    if (*freq) return cmd_freq(cfg);
    if (*sweep) return cmd_sweep(cfg);
    if (*shape) return cmd_shape(cfg);
    if (*verify) return cmd_verify(cfg);
    return cmd_algebra_check(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotAFrequency& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
