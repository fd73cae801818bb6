// sigcum: signatures, Magnus expansions and signature cumulants from files.
// Exit codes: 0 pass, 1 tolerance failure, 2 input error, 3 resource guard.

#include "output.hpp"

#include "sigcum/cumulants.hpp"
#include "sigcum/gaussian.hpp"
#include "sigcum/magnus.hpp"
#include "sigcum/models.hpp"
#include "sigcum/monte_carlo.hpp"
#include "sigcum/samplers.hpp"
#include "sigcum/signature.hpp"
#include "sigcum/volterra.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

using namespace sigcum;
using namespace sigcum::cli;

namespace {

// Raised when a computed residual or Monte Carlo comparison misses its tolerance; the report is still printed.
struct ToleranceFailure {
  Report report;
  std::string message;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

json read_json_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

Matrix matrix_from_json(const json& rows, int d) {
  Matrix a;
  for (const auto& row : rows) {
    const auto r = row.get<std::vector<double>>();
    if (static_cast<int>(r.size()) != d) throw InputError("covariance rows need d entries");
    a.insert(a.end(), r.begin(), r.end());
  }
  if (static_cast<int>(a.size()) != d * d) throw InputError("covariance needs d rows");
  return a;
}

// {"d", "a": matrix} or {"d", "knots": [t_0 .. t_m], "values": [m matrices]}.
GaussianMartingaleModel tdbm_from_json(const json& j) {
  try {
    const int d = json_int_field(j, "d");
    if (j.contains("knots")) {
      std::vector<Matrix> values;
      for (const auto& v : j.at("values")) values.push_back(matrix_from_json(v, d));
      return GaussianMartingaleModel::piecewise_constant(d, j["knots"].get<std::vector<double>>(), std::move(values));
    }
    return GaussianMartingaleModel::constant(d, matrix_from_json(j.at("a"), d));
  } catch (const json::exception& e) {
    throw InputError(std::string("time-dependent Brownian spec: ") + e.what());
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

struct Common {
  std::string format = "text";
  std::string out;
  bool exact = false;
};

// ---------------------------------------------------------------------------------------------------------
// sig

struct SigArgs {
  std::string file;
  int d = 1, depth = 2;
  std::optional<double> from, to;
  bool log = false;
};

template <class S>
Report run_sig(const SigArgs& a) {
  auto in = open_input(a.file);
  const auto path = read_path_jsonl<S>(in, a.d, a.depth);
  const double s = a.from.value_or(path.origin()), t = a.to.value_or(path.horizon());
  return tensor_report(a.log ? log_signature(path, s, t) : sig_path(path, s, t));
}

// ---------------------------------------------------------------------------------------------------------
// bch

struct BchArgs {
  std::vector<std::string> files;
  std::optional<int> depth;
};

template <class S>
Report run_bch(const BchArgs& a) {
  std::vector<Tensor<S>> xs;
  for (const auto& f : a.files) {
    auto x = tensor_from_json<S>(read_json_file(f));
    if (a.depth) x = resize_depth(x, *a.depth);
    if (!xs.empty()) require_same_shape(xs.front().shape(), x.shape(), "bch arguments");
    xs.push_back(std::move(x));
  }
  return tensor_report(bch(xs));
}

template <class S>
Report run_exp(const std::string& file) {
  return tensor_report(exp_trunc(tensor_from_json<S>(read_json_file(file))));
}

// ---------------------------------------------------------------------------------------------------------
// magnus

struct MagnusArgs {
  std::string file;
  int d = 1, depth = 2;
  std::optional<double> from, to;
  double tol = 1e-10;
  int steps = 8;
  std::string method = "ode";
};

Report run_magnus(const MagnusArgs& a) {
  auto in = open_input(a.file);
  const auto path = read_path_jsonl<double>(in, a.d, a.depth);
  const double s = a.from.value_or(path.origin()), t = a.to.value_or(path.horizon());
  Report r;
  Tensor<double> omega(path.shape());
  if (a.method == "ode") {
    MagnusOptions o;
    o.tol = a.tol;
    o.initial_steps = a.steps;
    auto rep = jump_magnus_report(path, s, t, o);
    omega = rep.omega;
    r = tensor_report(omega);
    r.meta["rk4_steps"] = rep.steps;
    r.meta["estimated_error"] = rep.estimated_error;
  } else if (a.method == "expansion") {
    omega = magnus_expansion(path, s, t, a.depth);
    r = tensor_report(omega);
  } else {
    throw InputError("unknown Magnus method '" + a.method + "'");
  }
  const double residual = max_abs_difference(omega, log_signature(path, s, t));
  r.meta["residual_vs_log_signature"] = residual;
  if (residual > 100.0 * a.tol + 1e-12)
    throw ToleranceFailure{r, "Magnus residual " + std::to_string(residual) + " above tolerance"};
  return r;
}

// ---------------------------------------------------------------------------------------------------------
// model

struct ModelArgs {
  std::string name;
  std::string spec;
  int d = 2;
  std::optional<int> depth;
  double t = 0.0, T = 1.0;
  bool gaussian = false;
};

json model_spec(const ModelArgs& a) {
  if (a.spec.empty()) throw InputError("model '" + a.name + "' needs a spec file");
  return read_json_file(a.spec);
}

Report run_model(const ModelArgs& a) {
  Report r;
  if (a.name == "fawcett") {
    r = tensor_report(fawcett(a.d, a.t, a.T, a.depth.value_or(2)));
  } else if (a.name == "levy") {
    r = tensor_report(levy_cumulant(levy_from_json(model_spec(a)), a.t, a.T, a.depth.value_or(4)));
  } else if (a.name == "tdbm") {
    const auto rep = gaussian_cumulant_report(tdbm_from_json(model_spec(a)), a.t, a.T, a.depth.value_or(4));
    r = tensor_report(rep.kappa);
    r.meta["panels"] = rep.panels;
    r.meta["estimated_error"] = rep.estimated_error;
  } else if (a.name == "volterra") {
    const auto spec = volterra_from_json(model_spec(a));
    if (a.gaussian) {
      r = tensor_report(gaussian_cumulant(volterra_gaussian_model(spec, a.T), a.t, a.T, a.depth.value_or(4)));
    } else {
      // Without forward-variance curves only t = 0 is defined; levels stop at 4.
      const int n = a.depth.value_or(4);
      if (n > 4) throw InputError("Volterra cumulants are available through level 4");
      r = tensor_report(truncate(volterra_cumulants(spec, a.t, a.T), n));
    }
  } else {
    throw InputError("unknown model '" + a.name + "' (fawcett, levy, tdbm, volterra)");
  }
  r.meta["model"] = a.name;
  r.meta["t"] = a.t;
  r.meta["T"] = a.T;
  return r;
}

// ---------------------------------------------------------------------------------------------------------
// cumulants

struct CumulantArgs {
  std::string file;
  std::string method = "oracle";
  std::optional<int> node;
  std::optional<int> depth;
  double tol = 1e-10;
  double t = 0.0, T = 1.0;
};

template <class S>
Report run_tree(const json& j, const CumulantArgs& a) {
  const auto m = tree_from_json<S>(j, a.depth);
  const auto v = static_cast<std::size_t>(a.node ? m.index_of(*a.node) : 0);
  if (a.method == "oracle") return tensor_report(tree_signature_cumulant(m)[v]);
  if (a.method == "G") return tensor_report(recursion_G(m)[v]);
  if (a.method == "H") return tensor_report(recursion_H(m)[v]);
  const auto state = tree_sym_state(m);
  if (a.method == "commutative") return sym_tensor_report(commutative_recursion(m, state)[v]);
  if (a.method != "all") throw InputError("unknown method '" + a.method + "' (oracle, G, H, commutative, all)");

  const auto oracle = tree_signature_cumulant(m), g = recursion_G(m), h = recursion_H(m);
  const auto comm = commutative_recursion(m, state), sym_oracle = tree_sym_cumulant_oracle(m, state);
  double rg = 0.0, rh = 0.0, rc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    rg = std::max(rg, max_abs_difference(oracle[i], g[i]));
    rh = std::max(rh, max_abs_difference(oracle[i], h[i]));
    rc = std::max(rc, max_abs_difference(sym_oracle[i], comm[i]));
  }
  Report r;
  r.columns = {"max_residual"};
  r.sparse_text = false;
  r.add_row("G", {rg});
  r.add_row("H", {rh});
  r.add_row("commutative", {rc});
  const double worst = std::max({rg, rh, rc});
  r.meta["nodes"] = m.size();
  r.meta["max_residual"] = worst;
  const bool exact = std::is_same_v<S, Rational>;
  if (exact ? worst != 0.0 : worst > a.tol) throw ToleranceFailure{r, "recursions disagree with the oracle"};
  return r;
}

Report run_cumulants(const CumulantArgs& a, bool exact) {
  const json j = read_json_file(a.file);
  if (j.is_object() && j.contains("nodes")) return exact ? run_tree<Rational>(j, a) : run_tree<double>(j, a);
  if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
    throw InputError(a.file + ": expected a tree (with 'nodes') or a model spec (with 'model')");
  ModelArgs m;
  m.name = j["model"].get<std::string>();
  m.spec = a.file;
  m.depth = a.depth;
  m.t = a.t;
  m.T = a.T;
  if (m.name == "fawcett") m.d = json_int_field(j, "d");
  return run_model(m);
}

// ---------------------------------------------------------------------------------------------------------
// mc

struct McArgs {
  std::string file;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  int steps = 200;
  int depth = 3;
  double T = 1.0;
  unsigned threads = 0;
  bool signature = false;
  double z_max = 3.0;
};

Report run_mc(const McArgs& a) {
  const json j = read_json_file(a.file);
  if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
    throw InputError(a.file + ": Monte Carlo spec needs a 'model' field");
  const std::string model = j["model"].get<std::string>();
  std::unique_ptr<PathSampler> sampler;
  std::optional<Tensor<double>> closed;
  int closed_levels = a.depth;  // levels covered by the closed form
  json extra = json::object();
  try {
    if (model == "brownian") {
      const int d = json_int_field(j, "d");
      sampler = std::make_unique<BrownianSampler>(BrownianSampler::standard(d, a.T, a.steps));
      closed = fawcett(d, 0.0, a.T, a.depth);
    } else if (model == "tdbm") {
      const auto m = tdbm_from_json(j);
      const int d = m.dim();
      sampler = std::make_unique<BrownianSampler>(
          d, [m, d](double t) { return cholesky_psd(m.covariance(t), d); }, a.T, a.steps);
      closed = gaussian_cumulant(m, 0.0, a.T, a.depth);
    } else if (model == "levy") {
      const auto k = levy_from_json(j);
      sampler = std::make_unique<LevySampler>(k, a.T, a.steps);
      closed = levy_cumulant(k, 0.0, a.T, a.depth);
    } else if (model == "volterra") {
      const auto spec = volterra_from_json(j);
      sampler = std::make_unique<VolterraEulerSampler>(spec, a.T, a.steps);
      closed_levels = std::min(a.depth, 4);
      closed = resize_depth(volterra_cumulants(spec, 0.0, a.T), a.depth);
    } else if (model == "stopped_bm") {
      const int d = json_int_field(j, "d");
      const int n = j.value("n", d);
      const auto x = j.value("x", std::vector<double>(static_cast<std::size_t>(d), 0.0));
      const std::string mode = j.value("detection", std::string("bridge"));
      if (mode != "bridge" && mode != "grid") throw InputError("detection must be 'bridge' or 'grid'");
      sampler = std::make_unique<StoppedBrownianSampler>(d, n, x, j.value("dt", 1e-3),
                                                         mode == "bridge" ? ExitDetection::Bridge : ExitDetection::Grid);
      // κ = (E τ / 2) Σ e_ii through level 2; nothing closed beyond.
      const double tau = unit_ball_exit_time(n, x);
      Tensor<double> c(AlgebraShape(d, a.depth));
      if (a.depth >= 2)
        for (int i = 1; i <= d; ++i) c.at({i, i}) = 0.5 * tau;
      closed = c;
      closed_levels = std::min(a.depth, 2);
      extra["exit_time_oracle"] = tau;
    } else {
      throw InputError("unknown Monte Carlo model '" + model + "' (brownian, tdbm, levy, volterra, stopped_bm)");
    }
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }

  const AlgebraShape sh(sampler->dim(), a.depth);
  const auto res = mc_expected_signature(*sampler, sh, {.paths = a.paths, .seed = a.seed, .threads = a.threads});
  const Tensor<double>& est = a.signature ? res.mean : res.log_mean;
  const Tensor<double>& se = a.signature ? res.stderr_ : res.log_stderr;
  if (a.signature) {
    if (closed_levels == a.depth)
      closed = exp_trunc(*closed);
    else
      closed.reset();
  }

  Report r;
  r.columns = {"estimate", "stderr"};
  if (closed) r.columns.insert(r.columns.end(), {"closed_form", "z"});
  r.sparse_text = false;
  double worst = 0.0;
  for (int k = 1; k <= a.depth; ++k) {
    for (std::size_t i = 0; i < sh.level_size(k); ++i) {
      const Word w = word_from_index(i, k, sh.dim());
      std::vector<json> cells{est.at(w), se.at(w)};
      if (closed) {
        if (k <= closed_levels) {
          const double diff = std::abs(est.at(w) - closed->at(w));
          const double z = se.at(w) > 0.0 ? diff / se.at(w) : (diff == 0.0 ? 0.0 : HUGE_VAL);
          worst = std::max(worst, z);
          cells.push_back(closed->at(w));
          cells.push_back(std::isfinite(z) ? json(z) : json("inf"));
        } else {
          cells.push_back(nullptr);
          cells.push_back(nullptr);
        }
      }
      r.add_row(word_label(w, sh.dim()), std::move(cells));
    }
  }
  r.meta["model"] = model;
  r.meta["quantity"] = a.signature ? "expected signature" : "signature cumulant";
  r.meta["seed"] = res.seed;
  r.meta["paths"] = res.paths;
  if (model != "stopped_bm") {
    r.meta["steps"] = a.steps;
    r.meta["T"] = a.T;
  }
  if (model == "volterra") r.meta["clamped_steps"] = res.clamps;
  if (model == "stopped_bm") {
    r.meta["exit_time"] = res.stop_time;
    r.meta["exit_time_stderr"] = res.stop_time_stderr;
    r.meta["censored"] = res.censored;
  }
  for (const auto& [k, v] : extra.items()) r.meta[k] = v;
  if (closed) {
    r.meta["max_z"] = worst;
    if (worst > a.z_max)
      throw ToleranceFailure{r, "Monte Carlo estimate outside " + std::to_string(a.z_max) + " stderr of the closed form"};
  }
  return r;
}

void apply_memory_guard() {
  const char* env = std::getenv("SIGCUM_MAX_COEFFS");
  if (!env) return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) throw InputError(std::string("SIGCUM_MAX_COEFFS is not a positive integer: ") + env);
  set_max_coefficients(static_cast<std::size_t>(v));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signatures, Magnus expansions and signature cumulants"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool exact) {
    sub->add_option("--format", common.format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
    sub->add_option("--out", common.out, "write to this file instead of stdout");
    if (exact) sub->add_flag("--exact", common.exact, "exact rational arithmetic");
  };

  SigArgs sig;
  auto* s_sig = app.add_subcommand("sig", "signature or log-signature of a JSONL path");
  s_sig->add_option("path", sig.file, "JSONL events")->required();
  s_sig->add_option("-d", sig.d, "alphabet size")->required();
  s_sig->add_option("-N", sig.depth, "truncation level")->required();
  s_sig->add_option("--from", sig.from);
  s_sig->add_option("--to", sig.to);
  s_sig->add_flag("--log", sig.log, "print the log-signature");
  add_common(s_sig, true);

  BchArgs bch_args;
  auto* s_bch = app.add_subcommand("bch", "log(exp(x_1) ... exp(x_n)) of tensor JSON files");
  s_bch->add_option("tensors", bch_args.files)->required();
  s_bch->add_option("-N", bch_args.depth, "truncation level (pads or truncates the inputs)");
  add_common(s_bch, true);

  std::string exp_file;
  auto* s_exp = app.add_subcommand("exp", "truncated exponential of a tensor JSON file");
  s_exp->add_option("tensor", exp_file)->required();
  add_common(s_exp, true);

  MagnusArgs mag;
  auto* s_mag = app.add_subcommand("magnus", "Magnus solve of a JSONL path, checked against the log-signature");
  s_mag->add_option("path", mag.file)->required();
  s_mag->add_option("-d", mag.d)->required();
  s_mag->add_option("-N", mag.depth)->required();
  s_mag->add_option("--from", mag.from);
  s_mag->add_option("--to", mag.to);
  s_mag->add_option("--tol", mag.tol, "Richardson tolerance");
  s_mag->add_option("--steps", mag.steps, "initial RK4 steps per linear stretch");
  s_mag->add_option("--method", mag.method, "ode or expansion")->check(CLI::IsMember({"ode", "expansion"}));
  add_common(s_mag, false);

  CumulantArgs cum;
  auto* s_cum = app.add_subcommand("cumulants", "signature cumulants of a tree or model spec");
  s_cum->add_option("spec", cum.file)->required();
  s_cum->add_option("--method", cum.method, "oracle, G, H, commutative or all")
      ->check(CLI::IsMember({"oracle", "G", "H", "commutative", "all"}));
  s_cum->add_option("--node", cum.node, "tree node id (default: root)");
  s_cum->add_option("-N", cum.depth, "truncation level");
  s_cum->add_option("--tol", cum.tol, "residual tolerance for --method all in float mode");
  s_cum->add_option("-t", cum.t);
  s_cum->add_option("-T", cum.T);
  add_common(s_cum, true);

  ModelArgs mod;
  auto* s_mod = app.add_subcommand("model", "closed-form cumulants: fawcett, levy, tdbm, volterra");
  s_mod->add_option("name", mod.name)->required()->check(CLI::IsMember({"fawcett", "levy", "tdbm", "volterra"}));
  s_mod->add_option("spec", mod.spec, "model JSON");
  s_mod->add_option("-d", mod.d, "dimension (fawcett)");
  s_mod->add_option("-N", mod.depth, "truncation level");
  s_mod->add_option("-t", mod.t);
  s_mod->add_option("-T", mod.T);
  s_mod->add_flag("--gaussian", mod.gaussian, "volterra: the correlated Gaussian variant");
  add_common(s_mod, false);

  McArgs mc;
  auto* s_mc = app.add_subcommand("mc", "Monte Carlo expected signature and cumulant");
  s_mc->add_option("spec", mc.file)->required();
  s_mc->add_option("--paths", mc.paths);
  s_mc->add_option("--seed", mc.seed)->required();
  s_mc->add_option("--steps", mc.steps, "time steps per path");
  s_mc->add_option("-N", mc.depth, "truncation level");
  s_mc->add_option("-T", mc.T, "horizon");
  s_mc->add_option("--threads", mc.threads, "0: all cores; results do not depend on it");
  s_mc->add_flag("--signature", mc.signature, "report the expected signature instead of its logarithm");
  s_mc->add_option("--z-max", mc.z_max, "largest accepted |estimate - closed form| / stderr");
  add_common(s_mc, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const Format fmt = parse_format(common.format);
  try {
    apply_memory_guard();
    Report r;
    if (*s_sig) r = common.exact ? run_sig<Rational>(sig) : run_sig<double>(sig);
    if (*s_bch) r = common.exact ? run_bch<Rational>(bch_args) : run_bch<double>(bch_args);
    if (*s_exp) r = common.exact ? run_exp<Rational>(exp_file) : run_exp<double>(exp_file);
    if (*s_mag) r = run_magnus(mag);
    if (*s_cum) r = run_cumulants(cum, common.exact);
    if (*s_mod) r = run_model(mod);
    if (*s_mc) r = run_mc(mc);
    emit(r, fmt, common.out);
    return 0;
  } catch (const ToleranceFailure& f) {
    emit(f.report, fmt, common.out);
    std::cerr << "sigcum: " << f.message << '\n';
    return 1;
  } catch (const ResourceError& e) {
    std::cerr << "sigcum: " << e.what() << '\n';
    return 3;
  } catch (const std::bad_alloc&) {
    std::cerr << "sigcum: out of memory\n";
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "sigcum: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "sigcum: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "sigcum: " << e.what() << '\n';
    return 2;
  }
}
