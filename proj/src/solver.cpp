#include "hjb/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hjb/errors.hpp"

namespace hjb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Largest q for which recover_primal stores B* densely.
constexpr int kMaxDenseB = 3000;

/// Quantities of the log-barrier at alpha. With W = U(alpha)^{-1} the n x n
/// matrix Phi W Phi' equals P P' + Diag(cdiag).
struct Barrier {
  bool feasible = false;
  double logdet = 0.0;
  Mat P;
  Vec cdiag;
  Vec mdiag;
};

Barrier evaluate_barrier(const Embedding& emb, double lambda,
                         const Vec& alpha) {
  const auto n = emb.n();
  const auto r = emb.rank();
  const double s = emb.identity_scale;
  Barrier out;
  if (alpha.size() != n) throw DomainError("dual: alpha has wrong size");

  // Eliminate the scaled identity block through its (diagonal) Schur
  // complement: U is PD iff lambda + s alpha > 0 and S is PD.
  Vec w, beta, cdiag;
  double logdet = 0.0;
  if (s > 0.0) {
    const Vec dl = (lambda + s * alpha.array()).matrix();
    if ((dl.array() <= 0.0).any()) return out;
    logdet += dl.array().log().sum();
    w = (lambda * alpha.array() / dl.array()).matrix();
    beta = (lambda / dl.array()).matrix();
    cdiag = (s / dl.array()).matrix();
  } else {
    w = alpha;
    beta = Vec::Ones(n);
    cdiag = Vec::Zero(n);
  }

  const Mat& G = emb.features;
  Mat S = Mat::Identity(r, r) * lambda;
  S.noalias() += G.transpose() * (w.asDiagonal() * G);
  Eigen::LLT<Mat> llt(S);
  if (llt.info() != Eigen::Success) return out;
  const auto Ld = llt.matrixLLT().diagonal();
  if (!Ld.allFinite() || (Ld.array() <= 0.0).any()) return out;
  logdet += 2.0 * Ld.array().log().sum();

  Mat X = (beta.asDiagonal() * G).transpose();
  llt.matrixL().solveInPlace(X);
  out.P = X.transpose();
  out.mdiag = out.P.rowwise().squaredNorm() + cdiag;
  out.cdiag = std::move(cdiag);
  out.logdet = logdet;
  out.feasible = std::isfinite(logdet) && out.mdiag.allFinite();
  return out;
}

double objective_from(const ConstraintSystem& cs, const Embedding& emb,
                      const SolverConfig& cfg, const Vec& alpha,
                      const Barrier& bar) {
  if (!bar.feasible) return kInf;
  const double eps = cfg.epsilon;
  const Vec lin = cs.c + cs.A.transpose() * alpha;
  double F = alpha.dot(cs.b) + lin.squaredNorm() / (4.0 * cfg.lambda_theta) +
             alpha.squaredNorm() / (4.0 * cfg.gamma) + cs.C;
  if (eps > 0.0)
    F += -eps * bar.logdet + eps * emb.q() * (std::log(eps) - 1.0);
  return F;
}

Vec gradient_from(const ConstraintSystem& cs, const SolverConfig& cfg,
                  const Vec& alpha, const Barrier& bar) {
  const Vec lin = cs.c + cs.A.transpose() * alpha;
  return cs.b + cs.A * lin / (2.0 * cfg.lambda_theta) +
         alpha / (2.0 * cfg.gamma) - cfg.epsilon * bar.mdiag;
}

Mat dense_hessian_from(const ConstraintSystem& cs, const SolverConfig& cfg,
                       const Barrier& bar) {
  const auto n = cs.n();
  Mat Mw = bar.P * bar.P.transpose();
  Mw.diagonal() += bar.cdiag;
  Mat H = Mw.cwiseAbs2() * cfg.epsilon;
  H.noalias() += cs.A * cs.A.transpose() / (2.0 * cfg.lambda_theta);
  H.diagonal().array() += 1.0 / (2.0 * cfg.gamma);
  (void)n;
  return H;
}

/// Rows p_i -> symmetric Kronecker features so that
/// sym(p_i) . sym(p_j) = (p_i . p_j)^2.
Mat symmetric_square_features(const Mat& P) {
  const auto n = P.rows();
  const auto r = P.cols();
  Mat out(n, r * (r + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index a = 0; a < r; ++a) {
    out.col(k++) = P.col(a).cwiseAbs2();
    for (Eigen::Index b = a + 1; b < r; ++b)
      out.col(k++) = std::numbers::sqrt2 * P.col(a).cwiseProduct(P.col(b));
  }
  return out;
}

/// H = Diag(dg) + Z Z' solved through the Woodbury identity with iterative
/// refinement.
class LowRankHessian {
 public:
  LowRankHessian(Vec dg, Mat Z) : dg_(std::move(dg)), Z_(std::move(Z)) {
    if ((dg_.array() <= 0.0).any())
      throw NumericalError("Newton: non-positive Hessian diagonal");
    dinv_sqrt_ = dg_.cwiseSqrt().cwiseInverse();
    Zs_ = dinv_sqrt_.asDiagonal() * Z_;
    const auto k = Z_.cols();
    Mat C = Mat::Identity(k, k);
    C.selfadjointView<Eigen::Lower>().rankUpdate(Zs_.transpose());
    cap_.compute(C);
    if (cap_.info() != Eigen::Success)
      throw NumericalError("Newton: capacitance factorization failed");
  }

  Vec solve(const Vec& rhs) const {
    Vec x = apply_inverse(rhs);
    for (int it = 0; it < 2; ++it) x += apply_inverse(rhs - apply(x));
    return x;
  }

 private:
  Vec apply(const Vec& x) const {
    return dg_.cwiseProduct(x) + Z_ * (Z_.transpose() * x);
  }
  Vec apply_inverse(const Vec& v) const {
    const Vec h = dinv_sqrt_.cwiseProduct(v);
    const Vec y = h - Zs_ * cap_.solve(Zs_.transpose() * h);
    return dinv_sqrt_.cwiseProduct(y);
  }

  Vec dg_;
  Mat Z_;
  Vec dinv_sqrt_;
  Mat Zs_;
  Eigen::LLT<Mat> cap_;
};

HessianMode resolve_mode(HessianMode mode, const ConstraintSystem& cs,
                         const Embedding& emb) {
  if (mode != HessianMode::automatic) return mode;
  const long r = emb.rank();
  const long k = cs.m() + r * (r + 1) / 2;
  return 2 * k <= cs.n() ? HessianMode::low_rank : HessianMode::dense;
}

Vec direction_from(const ConstraintSystem& cs, const SolverConfig& cfg,
                   const Barrier& bar, const Vec& grad, HessianMode mode) {
  if (mode == HessianMode::dense) {
    Mat H = dense_hessian_from(cs, cfg, bar);
    Eigen::LLT<Mat> llt(H);
    // near the barrier boundary roundoff in the Schur square can cost
    // positive definiteness; shift the diagonal a little
    const double base = 1e-14 * H.diagonal().cwiseAbs().maxCoeff();
    for (double shift = base; llt.info() != Eigen::Success; shift *= 10.0) {
      if (!(shift <= 1e-6 * H.diagonal().cwiseAbs().maxCoeff()))
        throw NumericalError("Newton: Hessian factorization failed");
      llt.compute(H + shift * Mat::Identity(H.rows(), H.cols()));
    }
    return -llt.solve(grad);
  }
  const auto n = cs.n();
  const Mat sq = symmetric_square_features(bar.P);
  Mat Z(n, cs.m() + sq.cols());
  Z.leftCols(cs.m()) = cs.A / std::sqrt(2.0 * cfg.lambda_theta);
  Z.rightCols(sq.cols()) = std::sqrt(cfg.epsilon) * sq;
  const Vec pn = bar.P.rowwise().squaredNorm();
  Vec dg = cfg.epsilon * (2.0 * bar.cdiag.cwiseProduct(pn) +
                          bar.cdiag.cwiseAbs2());
  dg.array() += 1.0 / (2.0 * cfg.gamma);
  return -LowRankHessian(std::move(dg), std::move(Z)).solve(grad);
}

void check_calculus_params(const SolverConfig& cfg) {
  if (!(cfg.lambda > 0.0) || !(cfg.lambda_theta > 0.0) || !(cfg.gamma > 0.0) ||
      !(cfg.epsilon >= 0.0))
    throw ParameterError("dual: lambda, lambda_theta, gamma must be > 0");
}

void check_shapes(const ConstraintSystem& cs, const Embedding& emb) {
  if (cs.n() == 0) throw ParameterError("dual: empty constraint set");
  if (emb.n() != cs.n())
    throw ParameterError("dual: embedding rows differ from constraint count");
}

Barrier feasible_barrier(const Embedding& emb, const SolverConfig& cfg,
                         const Vec& alpha, const char* who) {
  Barrier bar = evaluate_barrier(emb, cfg.lambda, alpha);
  if (!bar.feasible)
    throw DomainError(std::string(who) + ": U(alpha) is not positive definite");
  return bar;
}

}  // namespace

Mat Embedding::to_dense() const {
  if (identity_scale <= 0.0) return features;
  Mat out = Mat::Zero(n(), q());
  out.leftCols(rank()) = features;
  out.rightCols(n()).diagonal().setConstant(std::sqrt(identity_scale));
  return out;
}

Embedding kernel_embedding(const KernelSpec& spec,
                           std::span<const Sample> samples,
                           KernelFactorization mode) {
  spec.validate();
  const auto n = static_cast<int>(samples.size());
  if (n == 0) throw ParameterError("kernel_embedding: no samples");
  if (mode != KernelFactorization::dense) {
    const int cap = mode == KernelFactorization::low_rank ? n : n / 4;
    if (cap >= 1) {
      LowRankFactor f = pivoted_cholesky(spec, samples, 1e-12, cap);
      if (f.converged || mode == KernelFactorization::low_rank)
        return {std::move(f.G), kGramJitter};
    }
  }
  return Embedding::dense(cholesky_jitter(gram(spec, samples)).features());
}

Vec guided_embedding(const Sample& sample, int q_t, double u_scale, double T) {
  if (q_t < 1) throw ParameterError("guided_embedding: q_t must be >= 1");
  const auto d = sample.x.size();
  const auto p = sample.u.size();
  Vec out(p + q_t * d);
  out.head(p) = sample.u / u_scale;
  out.segment(p, d) = sample.x;
  for (int w = 1; w < q_t; ++w) {
    const double s =
        std::sin(w * std::numbers::pi / 2.0 * (sample.t / T - 1.0)) / w;
    out.segment(p + w * d, d) = s * sample.x;
  }
  return out;
}

Embedding guided_features(std::span<const Sample> samples, int q_t,
                          double u_scale, double T) {
  if (samples.empty()) throw ParameterError("guided_features: no samples");
  const auto dim = guided_embedding(samples[0], q_t, u_scale, T).size();
  Mat phi(static_cast<Eigen::Index>(samples.size()), dim);
  for (std::size_t i = 0; i < samples.size(); ++i)
    phi.row(static_cast<Eigen::Index>(i)) =
        guided_embedding(samples[i], q_t, u_scale, T).transpose();
  return Embedding::dense(std::move(phi));
}

std::vector<HomotopyStage> default_homotopy(double lambda_theta,
                                            double epsilon) {
  std::vector<HomotopyStage> out;
  // Cutting lambda_theta by 10 per stage leaves the warm start far from the
  // next central path, so it only halves.
  const double lt_factor[] = {8.0, 4.0, 2.0, 1.0};
  const double eps_factor[] = {1e3, 1e2, 1e1, 1.0};
  for (int k = 0; k < 4; ++k)
    out.push_back({lambda_theta * lt_factor[k], epsilon * eps_factor[k]});
  return out;
}

void SolverConfig::validate() const {
  if (!(lambda > 0.0) || !(lambda_theta > 0.0) || !(gamma > 0.0) ||
      !(epsilon > 0.0))
    throw ParameterError(
        "solver: lambda, lambda_theta, gamma, epsilon must be > 0");
  if (!(newton_tol > 0.0) || max_newton_iters < 1)
    throw ParameterError("solver: invalid Newton stopping rule");
  const auto st = stages();
  for (std::size_t k = 0; k < st.size(); ++k) {
    if (!(st[k].lambda_theta > 0.0) || !(st[k].epsilon > 0.0))
      throw ParameterError("solver: homotopy stages must be positive");
    if (k > 0 && !(st[k].lambda_theta < st[k - 1].lambda_theta &&
                   st[k].epsilon < st[k - 1].epsilon))
      throw ParameterError("solver: homotopy must strictly decrease");
  }
}

std::vector<HomotopyStage> SolverConfig::stages() const {
  auto st = homotopy.empty() ? default_homotopy(lambda_theta, epsilon)
                             : homotopy;
  const auto& last = st.back();
  if (last.lambda_theta != lambda_theta || last.epsilon != epsilon)
    st.push_back({lambda_theta, epsilon});
  return st;
}

Mat barrier_matrix(const Embedding& emb, double lambda, const Vec& alpha) {
  const Mat phi = emb.to_dense();
  Mat U = Mat::Identity(phi.cols(), phi.cols()) * lambda;
  U.noalias() += phi.transpose() * alpha.asDiagonal() * phi;
  return 0.5 * (U + U.transpose());
}

double dual_objective(const ConstraintSystem& cs, const Embedding& emb,
                      const SolverConfig& cfg, const Vec& alpha) {
  check_calculus_params(cfg);
  check_shapes(cs, emb);
  return objective_from(cs, emb, cfg, alpha,
                        evaluate_barrier(emb, cfg.lambda, alpha));
}

Vec dual_gradient(const ConstraintSystem& cs, const Embedding& emb,
                  const SolverConfig& cfg, const Vec& alpha) {
  check_calculus_params(cfg);
  check_shapes(cs, emb);
  return gradient_from(cs, cfg, alpha,
                       feasible_barrier(emb, cfg, alpha, "dual_gradient"));
}

Mat dual_hessian(const ConstraintSystem& cs, const Embedding& emb,
                 const SolverConfig& cfg, const Vec& alpha) {
  check_calculus_params(cfg);
  check_shapes(cs, emb);
  return dense_hessian_from(cs, cfg,
                            feasible_barrier(emb, cfg, alpha, "dual_hessian"));
}

Vec newton_direction(const ConstraintSystem& cs, const Embedding& emb,
                     const SolverConfig& cfg, const Vec& alpha,
                     HessianMode mode) {
  check_calculus_params(cfg);
  check_shapes(cs, emb);
  const Barrier bar = feasible_barrier(emb, cfg, alpha, "newton_direction");
  return direction_from(cs, cfg, bar, gradient_from(cs, cfg, alpha, bar),
                        resolve_mode(mode, cs, emb));
}

DualState damped_newton(const ConstraintSystem& cs, const Embedding& emb,
                        const SolverConfig& cfg, const Vec& alpha0) {
  cfg.validate();
  check_shapes(cs, emb);
  const HessianMode mode = resolve_mode(cfg.hessian, cs, emb);
  const double eps = cfg.epsilon;

  DualState st;
  st.alpha = alpha0;
  Barrier bar = evaluate_barrier(emb, cfg.lambda, st.alpha);
  if (!bar.feasible)
    throw DomainError("damped_newton: alpha0 outside the barrier domain");
  double F = objective_from(cs, emb, cfg, st.alpha, bar);

  for (int it = 0;; ++it) {
    const Vec g = gradient_from(cs, cfg, st.alpha, bar);
    const Vec dir = direction_from(cs, cfg, bar, g, mode);
    const double dec = std::sqrt(std::max(0.0, -g.dot(dir)) / eps);
    if (!std::isfinite(dec))
      throw NumericalError("damped_newton: non-finite Newton decrement");
    st.decrement_history.push_back(dec);
    st.objective_history.push_back(F);
    st.decrement = dec;
    st.objective = F;
    st.iterations = it;
    if (dec <= cfg.newton_tol) {
      st.converged = true;
      return st;
    }
    if (it == cfg.max_newton_iters) {
      std::ostringstream os;
      os << "damped_newton: no convergence after " << it
         << " iterations (decrement " << dec << ")";
      throw ConvergenceError(os.str(), dec);
    }

    // The damped step stays in the Dikin ellipsoid of F/eps; halving only
    // guards against roundoff at the domain boundary.
    const double damped = 1.0 / (1.0 + dec);
    const double slope = g.dot(dir);
    bool accepted = false;
    if (cfg.step_rule == StepRule::backtracking) {
      for (double step = 1.0; step > damped; step *= 0.5) {
        const Vec cand = st.alpha + step * dir;
        Barrier cand_bar = evaluate_barrier(emb, cfg.lambda, cand);
        const double Fc = objective_from(cs, emb, cfg, cand, cand_bar);
        if (Fc <= F + 0.25 * step * slope) {
          st.alpha = cand;
          bar = std::move(cand_bar);
          F = Fc;
          accepted = true;
          break;
        }
      }
    }
    for (double step = damped; !accepted; step *= 0.5) {
      if (step < 1e-12)
        throw NumericalError("damped_newton: step rejected at the barrier");
      const Vec cand = st.alpha + step * dir;
      Barrier cand_bar = evaluate_barrier(emb, cfg.lambda, cand);
      const double Fc = objective_from(cs, emb, cfg, cand, cand_bar);
      if (Fc <= F + 1e-13 * (1.0 + std::abs(F))) {
        st.alpha = cand;
        bar = std::move(cand_bar);
        F = Fc;
        accepted = true;
      }
    }
  }
}

Solution recover_primal(const ConstraintSystem& cs, const Embedding& emb,
                        const SolverConfig& cfg, const DualState& state) {
  check_calculus_params(cfg);
  check_shapes(cs, emb);
  const Vec& alpha = state.alpha;
  const Barrier bar = feasible_barrier(emb, cfg, alpha, "recover_primal");

  Solution sol;
  sol.alpha = alpha;
  sol.theta = (cs.c + cs.A.transpose() * alpha) / (2.0 * cfg.lambda_theta);
  sol.delta = -alpha / (2.0 * cfg.gamma);
  sol.sos_values = cfg.epsilon * bar.mdiag;
  if (emb.q() <= kMaxDenseB) {
    const Mat U = barrier_matrix(emb, cfg.lambda, alpha);
    Eigen::LLT<Mat> llt(U);
    Mat B = cfg.epsilon * llt.solve(Mat::Identity(U.rows(), U.cols()));
    sol.B = 0.5 * (B + B.transpose());
  }
  sol.diagnostics.iterations = state.iterations;
  sol.diagnostics.final_decrement = state.decrement;
  sol.diagnostics.final_objective = state.objective;
  return sol;
}

Solution solve_sos(const ConstraintSystem& cs, const Embedding& emb,
                   const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  if (cs.n() == 0) throw ParameterError("solve_sos: empty constraint set");
  check_shapes(cs, emb);

  const double tau = cfg.alpha0 < 0.0 ? 1.0 / cs.n() : cfg.alpha0;
  Vec alpha = Vec::Constant(cs.n(), tau);
  DualState st;
  SolveDiagnostics diag;
  const auto stages = cfg.stages();
  SolverConfig stage_cfg = cfg;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    stage_cfg.lambda_theta = stages[k].lambda_theta;
    stage_cfg.epsilon = stages[k].epsilon;
    stage_cfg.homotopy = {stages[k]};
    try {
      st = damped_newton(cs, emb, stage_cfg, alpha);
    } catch (const ConvergenceError& e) {
      std::ostringstream os;
      os << "homotopy stage " << k << ": " << e.what();
      throw ConvergenceError(os.str(), e.last_measure());
    }
    alpha = st.alpha;
    diag.stage_iterations.push_back(st.iterations);
    diag.iterations += st.iterations;
  }
  Solution sol = recover_primal(cs, emb, cfg, st);
  diag.final_decrement = st.decrement;
  diag.final_objective = st.objective;
  diag.seconds = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  sol.diagnostics = diag;
  return sol;
}

double lp_objective(const ConstraintSystem& cs, const SolverConfig& cfg,
                    const Vec& theta) {
  const Vec viol = (-(cs.residuals(theta))).cwiseMax(0.0);
  return cs.c.dot(theta) - cfg.lambda_theta * theta.squaredNorm() -
         cfg.gamma * viol.squaredNorm() + cs.C;
}

namespace {

/// Maximizer over s >= 0 of the concave piecewise-quadratic LP objective
/// along theta + s dir, found by walking the breakpoints of its derivative.
double exact_lp_step(const ConstraintSystem& cs, const SolverConfig& cfg,
                     const Vec& theta, const Vec& dir) {
  const Vec r = cs.residuals(theta);
  const Vec e = cs.A * dir;
  const double two_g = 2.0 * cfg.gamma;
  // Derivative on the current piece: slope0 - curvature * s.
  double slope0 = cs.c.dot(dir) - 2.0 * cfg.lambda_theta * theta.dot(dir);
  double curvature = 2.0 * cfg.lambda_theta * dir.squaredNorm();
  std::vector<std::pair<double, int>> breaks;
  for (int i = 0; i < cs.n(); ++i) {
    if (r(i) < 0.0) {
      slope0 -= two_g * r(i) * e(i);
      curvature += two_g * e(i) * e(i);
      if (e(i) > 0.0) breaks.emplace_back(-r(i) / e(i), i);
    } else if (e(i) < 0.0) {
      breaks.emplace_back(-r(i) / e(i), i);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  for (const auto& [s_break, i] : breaks) {
    if (curvature > 0.0 && slope0 <= curvature * s_break)
      return slope0 / curvature;
    // Constraint i switches between active and inactive at s_break.
    const double sign = r(i) < 0.0 ? -1.0 : 1.0;
    slope0 -= sign * two_g * r(i) * e(i);
    curvature += sign * two_g * e(i) * e(i);
  }
  return slope0 / curvature;
}

}  // namespace

Solution solve_lp(const ConstraintSystem& cs, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (!(cfg.lambda_theta > 0.0) || !(cfg.gamma > 0.0))
    throw ParameterError("solve_lp: lambda_theta and gamma must be > 0");
  if (cs.n() == 0) throw ParameterError("solve_lp: empty constraint set");
  const auto m = cs.m();

  Vec theta = Vec::Zero(m);
  double last_dec = 0.0;
  int it = 0;
  bool done = false;
  // Semismooth Newton ascent with exact line search.
  for (; it < cfg.max_newton_iters && !done; ++it) {
    const Vec r = cs.residuals(theta);
    const Vec viol = (-r).cwiseMax(0.0);
    const Vec g = cs.c - 2.0 * cfg.lambda_theta * theta +
                  2.0 * cfg.gamma * cs.A.transpose() * viol;
    Mat H = Mat::Identity(m, m) * (2.0 * cfg.lambda_theta);
    for (int i = 0; i < cs.n(); ++i)
      if (r(i) < 0.0)
        H.noalias() += 2.0 * cfg.gamma * cs.A.row(i).transpose() * cs.A.row(i);
    Eigen::LLT<Mat> llt(H);
    if (llt.info() != Eigen::Success)
      throw NumericalError("solve_lp: Newton system factorization failed");
    const Vec dir = llt.solve(g);
    const double dec2 = g.dot(dir);
    if (!std::isfinite(dec2))
      throw NumericalError("solve_lp: non-finite Newton decrement");
    last_dec = std::sqrt(std::max(dec2, 0.0));
    const double J = lp_objective(cs, cfg, theta);
    if (dec2 <= 1e-20 * (1.0 + std::abs(J))) break;

    const double step = exact_lp_step(cs, cfg, theta, dir);
    if (!(step > 0.0) || !std::isfinite(step))
      throw NumericalError("solve_lp: line search failed");
    const Vec cand = theta + step * dir;
    const bool same_active =
        ((cs.residuals(cand).array() < 0.0) == (r.array() < 0.0)).all();
    // A full step that keeps the active set lands on the exact maximizer.
    done = same_active && std::abs(step - 1.0) <= 1e-12;
    theta = cand;
  }
  if (!done && it >= cfg.max_newton_iters)
    throw ConvergenceError("solve_lp: iteration limit reached", last_dec);

  Solution sol;
  sol.theta = theta;
  sol.delta = cs.residuals(theta).cwiseMin(0.0);
  // Multipliers in the SoS sign convention delta = -alpha / (2 gamma).
  sol.alpha = -2.0 * cfg.gamma * sol.delta;
  sol.sos_values = Vec::Zero(cs.n());
  sol.diagnostics.iterations = it;
  sol.diagnostics.final_decrement = last_dec;
  sol.diagnostics.final_objective = lp_objective(cs, cfg, theta);
  sol.diagnostics.seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
  return sol;
}

}  // namespace hjb
