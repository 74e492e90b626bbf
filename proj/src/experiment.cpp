#include "hjb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "hjb/errors.hpp"

namespace hjb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kRiccatiSteps = 2000;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"problem",
       {"kind", "T", "d", "p", "A", "B", "Q", "R", "M", "state_lo", "state_hi",
        "control_lo", "control_hi", "u_star", "g_min"}},
      {"basis", {"kind", "m_t", "q_t", "guided_u_scale"}},
      {"kernel",
       {"kind", "u_scale", "t_scale", "degree", "sigma", "factorization"}},
      {"sampling", {"n_t", "n_x", "objective"}},
      {"solver",
       {"epsilon", "eta", "newton_tol", "max_newton_iters", "step_rule",
        "hessian"}},
      {"sweep",
       {"methods", "lp_lambda_theta", "lp_gamma", "guided_lambda",
        "guided_lambda_theta", "guided_gamma", "kernel_lambda",
        "kernel_lambda_theta", "kernel_gamma"}},
      {"output",
       {"eval_n_t", "eval_n_x", "rollout_steps", "record_timing",
        "dump_values", "projection_baseline", "workers"}},
  };
  return keys;
}

Mat matrix_from(const std::vector<double>& v, int rows, int cols,
                const char* name) {
  if (static_cast<int>(v.size()) != rows * cols) {
    std::ostringstream os;
    os << "config: [problem] " << name << " needs " << rows * cols
       << " entries (row-major " << rows << "x" << cols << "), got "
       << v.size();
    throw ParameterError(os.str());
  }
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  return m;
}

Box box_from(const std::vector<double>& lo, const std::vector<double>& hi,
             int dim, const char* name) {
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
    throw ParameterError(std::string("config: [problem] ") + name +
                         " bounds must have one entry per dimension");
  return Box{Eigen::Map<const Vec>(lo.data(), dim),
             Eigen::Map<const Vec>(hi.data(), dim)};
}

/// Problem, ground truth (if any) and basis of an experiment.
struct Setup {
  ControlProblem problem;
  std::optional<ValueFunction> truth;
  FeatureBasis basis;
};

Setup make_setup(const ExperimentConfig& cfg) {
  const ProblemConfig& pc = cfg.problem;
  ControlProblem problem;
  std::optional<ValueFunction> truth;
  if (pc.kind == "lqr_double_integrator" || pc.kind == "custom") {
    LqrProblem lqr;
    Box sbox, cbox;
    if (pc.kind == "lqr_double_integrator") {
      lqr = double_integrator_lqr();
      const ControlProblem ref = double_integrator_problem();
      sbox = ref.state_box;
      cbox = ref.control_box;
    } else {
      lqr.A = matrix_from(pc.A, pc.d, pc.d, "A");
      lqr.B = matrix_from(pc.B, pc.d, pc.p, "B");
      lqr.Q = matrix_from(pc.Q, pc.d, pc.d, "Q");
      lqr.R = matrix_from(pc.R, pc.p, pc.p, "R");
      lqr.M = matrix_from(pc.M, pc.d, pc.d, "M");
      sbox = box_from(pc.state_lo, pc.state_hi, pc.d, "state");
      cbox = box_from(pc.control_lo, pc.control_hi, pc.p, "control");
    }
    lqr.T = pc.T;
    problem = make_lqr_problem(lqr, sbox, cbox);
    truth = lqr_value_function(riccati_backward_solve(lqr, kRiccatiSteps));
  } else if (pc.kind == "example1") {
    const double lo = pc.control_lo.empty() ? -1.0 : pc.control_lo.at(0);
    const double hi = pc.control_hi.empty() ? 1.0 : pc.control_hi.at(0);
    const double us = pc.u_star, gmin = pc.g_min;
    auto g = [us, gmin](const Vec& u) {
      return (u(0) - us) * (u(0) - us) + gmin;
    };
    problem = pure_cost_problem(g, Box::uniform(1, lo, hi), pc.T);
    // V*(t) = (T - t) min_u g(u) over the control interval.
    const double best = g(Vec::Constant(1, std::clamp(us, lo, hi)));
    const double T = pc.T;
    truth = ValueFunction{
        [best, T](double t, const Vec&) { return (T - t) * best; },
        [best](double, const Vec&) { return -best; },
        [](double, const Vec& x) { return Vec::Zero(x.size()).eval(); }};
  } else {
    throw ParameterError("config: unknown problem kind '" + pc.kind + "'");
  }

  const FeatureBasis basis =
      cfg.basis == "sine_quadratic"
          ? FeatureBasis::sine_quadratic(cfg.m_t, problem.T, problem.d)
      : cfg.basis == "linear_decay"
          ? FeatureBasis::linear_decay(problem.T, problem.d)
          : throw ParameterError("config: unknown basis '" + cfg.basis + "'");
  return {std::move(problem), std::move(truth), basis};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s) {
  if (s.empty()) return kNaN;
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParameterError("csv: bad number '" + s + "'");
  return x;
}

/// NaN-aware ordering key of the hyperparameters (NaN sorts first).
std::tuple<double, double, double> hyper_key(const ResultRow& r) {
  auto k = [](double x) {
    return std::isnan(x) ? -std::numeric_limits<double>::infinity() : x;
  };
  return {k(r.lambda), k(r.lambda_theta), k(r.gamma)};
}

struct Job {
  std::size_t sweep_index;
  Method method;
  double lambda;
  double lambda_theta;
  double gamma;
};

struct JobResult {
  ResultRow row;
  Vec theta;
};

/// Shared, immutable data of one sweep point.
struct SweepData {
  int n_x = 0;
  SampleSet samples;
  ConstraintSystem cs;
  std::optional<Embedding> guided;
  std::optional<Embedding> kernel;
};

std::string status_of(const std::exception& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence_error";
  if (dynamic_cast<const DivergenceError*>(&e)) return "divergence_error";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical_error";
  if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
  if (dynamic_cast<const ParameterError*>(&e)) return "parameter_error";
  return "error";
}

void fill_metrics(ResultRow& row, const ExperimentConfig& cfg,
                  const Setup& setup, const ConstraintSystem& cs,
                  const Vec& theta, const GridSpec& grid) {
  const ValueModel model{setup.basis, theta, setup.problem.terminal};
  const ValueFunction vf = model.handle();
  row.violation = (-cs.residuals(theta)).cwiseMax(0.0).mean();
  row.value_error =
      setup.truth ? value_error(vf, *setup.truth, grid) : kNaN;
  try {
    row.policy_cost = policy_cost(setup.problem,
                                  greedy_policy(setup.problem, vf), grid,
                                  cfg.rollout_steps)
                          .mean;
  } catch (const DivergenceError&) {
    row.policy_cost = kNaN;
    row.status = "policy_diverged";
  }
}

JobResult run_job(const ExperimentConfig& cfg, const Setup& setup,
                  const SweepData& data, const Job& job,
                  const GridSpec& grid) {
  JobResult out;
  ResultRow& row = out.row;
  row.method = method_name(job.method);
  row.n_t = cfg.n_t;
  row.n_x = data.n_x;
  row.n_u = data.n_x;
  row.n = data.cs.n();
  row.lambda = job.lambda;
  row.lambda_theta = job.lambda_theta;
  row.gamma = job.gamma;
  row.epsilon = job.method == Method::lp ? kNaN : cfg.epsilon;
  row.eta = cfg.eta;

  SolverConfig sc;
  if (job.method != Method::lp) sc.lambda = job.lambda;
  sc.lambda_theta = job.lambda_theta;
  sc.gamma = job.gamma;
  sc.epsilon = cfg.epsilon;
  sc.newton_tol = cfg.newton_tol;
  sc.max_newton_iters = cfg.max_newton_iters;
  sc.step_rule = cfg.step_rule;
  sc.hessian = cfg.hessian;

  const auto start = std::chrono::steady_clock::now();
  try {
    Solution sol;
    switch (job.method) {
      case Method::lp: sol = solve_lp(data.cs, sc); break;
      case Method::guided: sol = solve_sos(data.cs, *data.guided, sc); break;
      case Method::kernel: sol = solve_sos(data.cs, *data.kernel, sc); break;
    }
    row.newton_iters = sol.diagnostics.iterations;
    row.final_decrement = sol.diagnostics.final_decrement;
    out.theta = sol.theta;
  } catch (const Error& e) {
    row.status = status_of(e);
    row.value_error = row.policy_cost = row.final_decrement = kNaN;
    row.violation = kNaN;
  }
  row.solve_seconds =
      cfg.record_timing ? std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count()
                        : 0.0;
  if (row.status == "ok") fill_metrics(row, cfg, setup, data.cs, out.theta, grid);
  return out;
}

std::vector<Job> make_jobs(const ExperimentConfig& cfg, std::size_t n_sweep) {
  std::vector<Method> methods = cfg.methods;
  std::sort(methods.begin(), methods.end(), [](Method a, Method b) {
    return method_name(a) < method_name(b);
  });
  std::vector<Job> jobs;
  for (Method m : methods) {
    const HyperGrid& g = cfg.grid(m);
    std::vector<double> lambdas = g.lambda;
    if (m == Method::lp) lambdas = {kNaN};
    std::sort(lambdas.begin(), lambdas.end());
    std::vector<double> lts = g.lambda_theta, gs = g.gamma;
    std::sort(lts.begin(), lts.end());
    std::sort(gs.begin(), gs.end());
    for (std::size_t s = 0; s < n_sweep; ++s)
      for (double l : lambdas)
        for (double lt : lts)
          for (double ga : gs) jobs.push_back({s, m, l, lt, ga});
  }
  return jobs;
}

std::string dump_name(const std::string& method, int n_x) {
  std::ostringstream os;
  os << method << "_nx" << n_x << ".csv";
  return os.str();
}

void check_positive(const std::vector<double>& v, const std::string& what) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x))
      throw ParameterError("config: " + what + " values must be positive");
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::lp: return "lp";
    case Method::guided: return "guided";
    case Method::kernel: return "kernel";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "lp") return Method::lp;
  if (name == "guided") return Method::guided;
  if (name == "kernel") return Method::kernel;
  throw ParameterError("unknown method '" + name + "'");
}

ExperimentConfig ExperimentConfig::from_document(const ConfigDocument& doc) {
  for (const auto& section : doc.sections()) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end())
      throw ParameterError("config: unknown section [" + section + "]");
    for (const auto& key : doc.keys(section))
      if (!it->second.count(key))
        throw ParameterError("config: unknown key '" + key + "' in [" +
                             section + "]");
  }

  ExperimentConfig c;
  ProblemConfig& p = c.problem;
  p.kind = doc.string("problem", "kind", p.kind);
  p.T = doc.number("problem", "T", p.T);
  p.d = doc.integer("problem", "d", p.d);
  p.p = doc.integer("problem", "p", p.p);
  p.A = doc.numbers("problem", "A", p.A);
  p.B = doc.numbers("problem", "B", p.B);
  p.Q = doc.numbers("problem", "Q", p.Q);
  p.R = doc.numbers("problem", "R", p.R);
  p.M = doc.numbers("problem", "M", p.M);
  p.state_lo = doc.numbers("problem", "state_lo", p.state_lo);
  p.state_hi = doc.numbers("problem", "state_hi", p.state_hi);
  p.control_lo = doc.numbers("problem", "control_lo", p.control_lo);
  p.control_hi = doc.numbers("problem", "control_hi", p.control_hi);
  p.u_star = doc.number("problem", "u_star", p.u_star);
  p.g_min = doc.number("problem", "g_min", p.g_min);

  c.basis = doc.string("basis", "kind",
                       p.kind == "example1" ? "linear_decay" : c.basis);
  c.m_t = doc.integer("basis", "m_t", c.m_t);
  c.q_t = doc.integer("basis", "q_t", c.q_t);
  c.guided_u_scale = doc.number("basis", "guided_u_scale", c.guided_u_scale);

  const std::string kind = doc.string("kernel", "kind", "control_affine");
  if (kind == "control_affine")
    c.kernel.kind = KernelKind::control_affine;
  else if (kind == "polynomial")
    c.kernel.kind = KernelKind::polynomial;
  else if (kind == "exponential")
    c.kernel.kind = KernelKind::exponential;
  else
    throw ParameterError("config: unknown kernel kind '" + kind + "'");
  c.kernel.u_scale = doc.number("kernel", "u_scale", c.kernel.u_scale);
  c.kernel.t_scale = doc.number("kernel", "t_scale", c.kernel.t_scale);
  c.kernel.degree = doc.integer("kernel", "degree", c.kernel.degree);
  c.kernel.sigma = doc.number("kernel", "sigma", c.kernel.sigma);
  const std::string fac = doc.string("kernel", "factorization", "automatic");
  if (fac == "automatic")
    c.factorization = KernelFactorization::automatic;
  else if (fac == "dense")
    c.factorization = KernelFactorization::dense;
  else if (fac == "low_rank")
    c.factorization = KernelFactorization::low_rank;
  else
    throw ParameterError("config: unknown kernel factorization '" + fac + "'");

  c.n_t = doc.integer("sampling", "n_t", c.n_t);
  c.sweep = doc.integers("sampling", "n_x", c.sweep);
  const std::string obj = doc.string("sampling", "objective", "all_samples");
  if (obj == "all_samples")
    c.objective = ObjectiveMode::all_samples;
  else if (obj == "initial_points")
    c.objective = ObjectiveMode::initial_points;
  else
    throw ParameterError("config: unknown objective '" + obj + "'");

  c.epsilon = doc.number("solver", "epsilon", c.epsilon);
  c.eta = doc.number("solver", "eta", c.eta);
  c.newton_tol = doc.number("solver", "newton_tol", c.newton_tol);
  c.max_newton_iters =
      doc.integer("solver", "max_newton_iters", c.max_newton_iters);
  const std::string step = doc.string("solver", "step_rule", "damped");
  if (step == "damped")
    c.step_rule = StepRule::damped;
  else if (step == "backtracking")
    c.step_rule = StepRule::backtracking;
  else
    throw ParameterError("config: unknown step_rule '" + step + "'");
  const std::string hess = doc.string("solver", "hessian", "automatic");
  if (hess == "automatic")
    c.hessian = HessianMode::automatic;
  else if (hess == "dense")
    c.hessian = HessianMode::dense;
  else if (hess == "low_rank")
    c.hessian = HessianMode::low_rank;
  else
    throw ParameterError("config: unknown hessian mode '" + hess + "'");

  if (doc.has("sweep", "methods")) {
    c.methods.clear();
    for (const auto& name : doc.strings("sweep", "methods", {}))
      c.methods.push_back(parse_method(name));
  }
  c.lp_grid.lambda_theta =
      doc.numbers("sweep", "lp_lambda_theta", c.lp_grid.lambda_theta);
  c.lp_grid.gamma = doc.numbers("sweep", "lp_gamma", c.lp_grid.gamma);
  c.guided_grid.lambda =
      doc.numbers("sweep", "guided_lambda", c.guided_grid.lambda);
  c.guided_grid.lambda_theta =
      doc.numbers("sweep", "guided_lambda_theta", c.guided_grid.lambda_theta);
  c.guided_grid.gamma =
      doc.numbers("sweep", "guided_gamma", c.guided_grid.gamma);
  c.kernel_grid.lambda =
      doc.numbers("sweep", "kernel_lambda", c.kernel_grid.lambda);
  c.kernel_grid.lambda_theta =
      doc.numbers("sweep", "kernel_lambda_theta", c.kernel_grid.lambda_theta);
  c.kernel_grid.gamma =
      doc.numbers("sweep", "kernel_gamma", c.kernel_grid.gamma);

  c.eval_n_t = doc.integer("output", "eval_n_t", c.eval_n_t);
  c.eval_n_x = doc.integer("output", "eval_n_x", c.eval_n_x);
  c.rollout_steps = doc.integer("output", "rollout_steps", c.rollout_steps);
  c.record_timing = doc.boolean("output", "record_timing", c.record_timing);
  c.dump_values = doc.boolean("output", "dump_values", c.dump_values);
  c.projection_baseline =
      doc.boolean("output", "projection_baseline", c.projection_baseline);
  c.workers = doc.integer("output", "workers", c.workers);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  return from_document(ConfigDocument::load(path));
}

void ExperimentConfig::validate() const {
  if (problem.kind != "lqr_double_integrator" && problem.kind != "example1" &&
      problem.kind != "custom")
    throw ParameterError("config: unknown problem kind '" + problem.kind + "'");
  if (basis != "sine_quadratic" && basis != "linear_decay")
    throw ParameterError("config: unknown basis '" + basis + "'");
  if (methods.empty()) throw ParameterError("config: no methods selected");
  if (sweep.empty()) throw ParameterError("config: empty n_x sweep");
  for (int v : sweep)
    if (v < 1) throw ParameterError("config: sweep values must be >= 1");
  if (n_t < 1) throw ParameterError("config: n_t must be >= 1");
  if (m_t < 1 || q_t < 1) throw ParameterError("config: m_t, q_t must be >= 1");
  if (!(guided_u_scale > 0.0))
    throw ParameterError("config: guided_u_scale must be > 0");
  if (!(epsilon > 0.0)) throw ParameterError("config: epsilon must be > 0");
  if (!(eta >= 0.0)) throw ParameterError("config: eta must be >= 0");
  if (!(problem.T > 0.0)) throw ParameterError("config: T must be > 0");
  if (eval_n_t < 1 || eval_n_x < 1 || rollout_steps < 1)
    throw ParameterError("config: evaluation grid and rollout must be >= 1");
  if (workers < 1) throw ParameterError("config: workers must be >= 1");
  for (Method m : methods) {
    const HyperGrid& g = grid(m);
    const std::string name = method_name(m);
    if (m != Method::lp) {
      if (g.lambda.empty())
        throw ParameterError("config: empty " + name + " lambda grid");
      check_positive(g.lambda, name + " lambda");
    }
    if (g.lambda_theta.empty() || g.gamma.empty())
      throw ParameterError("config: empty " + name + " grid");
    check_positive(g.lambda_theta, name + " lambda_theta");
    check_positive(g.gamma, name + " gamma");
  }
}

const HyperGrid& ExperimentConfig::grid(Method m) const {
  switch (m) {
    case Method::lp: return lp_grid;
    case Method::guided: return guided_grid;
    case Method::kernel: return kernel_grid;
  }
  return lp_grid;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols{
      "method",      "n_t",          "n_x",          "n_u",
      "n",           "lambda",       "lambda_theta", "gamma",
      "epsilon",     "eta",          "value_error",  "policy_cost",
      "newton_iters", "final_decrement", "solve_seconds", "status"};
  return cols;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : result_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string csv_line(const ResultRow& r) {
  std::ostringstream os;
  os << r.method << ',' << r.n_t << ',' << r.n_x << ',' << r.n_u << ','
     << r.n << ',' << format_number(r.lambda) << ','
     << format_number(r.lambda_theta) << ',' << format_number(r.gamma) << ','
     << format_number(r.epsilon) << ',' << format_number(r.eta) << ','
     << format_number(r.value_error) << ',' << format_number(r.policy_cost)
     << ',' << r.newton_iters << ',' << format_number(r.final_decrement)
     << ',' << format_number(r.solve_seconds) << ',' << r.status;
  return os.str();
}

void write_results_csv(const std::string& path,
                       const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << csv_header() << '\n';
  for (const auto& r : rows) out << csv_line(r) << '\n';
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw ParameterError("csv: unexpected header in " + path);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != result_columns().size())
      throw ParameterError("csv: wrong field count in " + path);
    ResultRow r;
    r.method = f[0];
    r.n_t = static_cast<int>(parse_number(f[1]));
    r.n_x = static_cast<int>(parse_number(f[2]));
    r.n_u = static_cast<int>(parse_number(f[3]));
    r.n = static_cast<int>(parse_number(f[4]));
    r.lambda = parse_number(f[5]);
    r.lambda_theta = parse_number(f[6]);
    r.gamma = parse_number(f[7]);
    r.epsilon = parse_number(f[8]);
    r.eta = parse_number(f[9]);
    r.value_error = parse_number(f[10]);
    r.policy_cost = parse_number(f[11]);
    r.newton_iters = static_cast<int>(parse_number(f[12]));
    r.final_decrement = parse_number(f[13]);
    r.solve_seconds = parse_number(f[14]);
    r.status = f[15];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::optional<std::size_t> select_best(const std::vector<ResultRow>& rows) {
  std::optional<std::size_t> best;
  auto score = [](const ResultRow& r) {
    return std::isnan(r.value_error) ? r.violation : r.value_error;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.status != "ok" || std::isnan(score(r))) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = rows[*best];
    if (score(r) < score(b) ||
        (score(r) == score(b) && hyper_key(r) < hyper_key(b)))
      best = i;
  }
  return best;
}

void dump_value_function(const ValueFunction& model, const ValueFunction& truth,
                         const GridSpec& grid, const std::string& path) {
  const auto points = grid.points();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const auto d = grid.state_box.dim();
  out << 't';
  for (int k = 1; k <= d; ++k) out << ",x" << k;
  out << ",v_model,v_true\n";
  for (const auto& [t, x] : points) {
    out << format_number(t);
    for (int k = 0; k < d; ++k) out << ',' << format_number(x(k));
    out << ',' << format_number(model.value(t, x)) << ','
        << format_number(truth.value(t, x)) << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
  cfg.validate();
  const Setup setup = make_setup(cfg);
  const GridSpec grid =
      GridSpec::for_problem(setup.problem, cfg.eval_n_t, cfg.eval_n_x);
  KernelSpec kspec = cfg.kernel;
  kspec.d = setup.problem.d;
  kspec.p = setup.problem.p;
  const bool want_guided = std::count(cfg.methods.begin(), cfg.methods.end(),
                                      Method::guided) > 0;
  const bool want_kernel = std::count(cfg.methods.begin(), cfg.methods.end(),
                                      Method::kernel) > 0;

  std::vector<int> sweep = cfg.sweep;
  std::sort(sweep.begin(), sweep.end());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());
  std::vector<SweepData> data(sweep.size());
  for (std::size_t s = 0; s < sweep.size(); ++s) {
    SweepData& sd = data[s];
    sd.n_x = sweep[s];
    sd.samples = build_sample_set(setup.problem, cfg.n_t, sd.n_x, sd.n_x);
    sd.cs = assemble(setup.problem, setup.basis, sd.samples, cfg.eta,
                     cfg.objective);
    if (want_guided)
      sd.guided = guided_features(sd.samples.triples, cfg.q_t,
                                  cfg.guided_u_scale, setup.problem.T);
    if (want_kernel)
      sd.kernel = kernel_embedding(kspec, sd.samples.triples,
                                   cfg.factorization);
  }

  const std::vector<Job> jobs = make_jobs(cfg, sweep.size());
  std::vector<JobResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t j; (j = next++) < jobs.size();) {
      try {
        results[j] = run_job(cfg, setup, data[jobs[j].sweep_index], jobs[j],
                             grid);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_workers =
      std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult out;
  std::vector<std::pair<std::string, Vec>> dumps;
  for (const auto& r : results) out.raw.push_back(r.row);

  // Jobs are grouped by (method, sweep point) in order.
  for (std::size_t begin = 0; begin < jobs.size();) {
    std::size_t end = begin;
    while (end < jobs.size() && jobs[end].method == jobs[begin].method &&
           jobs[end].sweep_index == jobs[begin].sweep_index)
      ++end;
    const std::vector<ResultRow> group(out.raw.begin() + begin,
                                       out.raw.begin() + end);
    const auto best = select_best(group);
    if (best) {
      out.best.push_back(group[*best]);
      dumps.emplace_back(dump_name(group[*best].method, group[*best].n_x),
                         results[begin + *best].theta);
    } else {
      ResultRow failed = group.front();
      failed.lambda = failed.lambda_theta = failed.gamma = kNaN;
      failed.value_error = failed.policy_cost = failed.final_decrement = kNaN;
      failed.newton_iters = 0;
      failed.solve_seconds = 0.0;
      failed.status = "all_failed";
      out.best.push_back(failed);
    }
    begin = end;
  }

  if (cfg.projection_baseline && setup.truth) {
    const Vec theta = project_truth(setup.basis, setup.problem.terminal,
                                    *setup.truth, grid);
    for (const auto& sd : data) {
      ResultRow row;
      row.method = "projection";
      row.n_t = cfg.n_t;
      row.n_x = row.n_u = sd.n_x;
      row.n = sd.cs.n();
      row.lambda = row.lambda_theta = row.gamma = row.epsilon = kNaN;
      row.eta = cfg.eta;
      row.final_decrement = kNaN;
      fill_metrics(row, cfg, setup, sd.cs, theta, grid);
      out.best.push_back(row);
    }
    dumps.emplace_back("projection.csv", theta);
  }

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    write_results_csv((fs::path(out_dir) / "results.csv").string(), out.best);
    write_results_csv((fs::path(out_dir) / "results_raw.csv").string(),
                      out.raw);
    if (cfg.dump_values && setup.truth) {
      const fs::path dir = fs::path(out_dir) / "values";
      fs::create_directories(dir, ec);
      if (ec) throw IoError("cannot create " + dir.string() + ": " +
                            ec.message());
      for (const auto& [name, theta] : dumps) {
        const ValueModel model{setup.basis, theta, setup.problem.terminal};
        dump_value_function(model.handle(), *setup.truth, grid,
                            (dir / name).string());
      }
    }
  }
  return out;
}

}  // namespace hjb
