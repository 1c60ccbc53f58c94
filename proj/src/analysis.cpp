#include "nsqp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nsqp/errors.hpp"
#include "nsqp/qp_solver.hpp"
#include "nsqp/qp_subproblem.hpp"

namespace nsqp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlackZero = 1e-10;

template <typename... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

}  // namespace

PotentialParams default_potential_params(const ProblemSpec& spec, double b, double theta_bar) {
  if (!spec.rho) throw CapabilityError("potential parameters need a declared rho");
  PotentialParams params;
  params.sigma = *spec.rho + 1.0;
  params.ell = std::min(2.0 * b - params.sigma, b);
  params.box = spec.box;
  if (!spec.affine_constraints) {
    if (!spec.lip_h) throw CapabilityError("potential parameters need a declared H");
    params.c_b = theta_bar * spec.m() * *spec.lip_h / b;
  }
  return params;
}

std::vector<std::string> potential_premise_violations(const ProblemSpec& spec,
                                                      const PotentialParams& params, double b) {
  std::vector<std::string> out;
  const double s = params.sigma;
  const double l = params.ell;
  if (spec.rho && !(s > *spec.rho)) out.push_back(fmt("sigma > rho (%g <= %g)", s, *spec.rho));
  if (!(l > 0.0)) out.push_back(fmt("l > 0 (l = %g)", l));
  if (!(b >= s)) out.push_back(fmt("b >= sigma (%g < %g)", b, s));
  if (!(2.0 * b >= s + l)) out.push_back(fmt("2b >= sigma + l (%g < %g)", 2.0 * b, s + l));
  if (!spec.affine_constraints) {
    if (!(params.c_b > 0.0 && params.c_b < 1.0)) {
      out.push_back(fmt("0 < c_b < 1 (c_b = %g)", params.c_b));
    }
    if (!(l > params.c_b * b)) out.push_back(fmt("l > c_b b (%g <= %g)", l, params.c_b * b));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conjugate

ConjugateOracle::ConjugateOracle(const ProblemSpec& spec, const PotentialParams& params)
    : spec_(&spec), params_(params), points_(params.grid_points_per_dim) {
  const int n = spec.n;
  if (n > 2) throw UnsupportedDimensionError("conjugate: grid conjugate supports n <= 2 only");
  if (n < 1) throw ContractError("conjugate: empty problem");
  if (params.box.dim() != n) throw ContractError("conjugate: box dimension mismatch");
  if (spec.rho && !(params.sigma > *spec.rho)) throw ContractError("conjugate: sigma must exceed rho");
  if (points_ < 2 || !(params.refine_spacing > 0.0)) {
    throw ContractError("conjugate: invalid grid settings");
  }
  spacing_ = (params.box.upper - params.box.lower) / (points_ - 1);
  long total = points_;
  if (n == 2) total *= points_;
  nodes_.reserve(static_cast<std::size_t>(total));
  values_.reserve(static_cast<std::size_t>(total));
  Vector x(n);
  for (long flat = 0; flat < total; ++flat) {
    long r = flat;
    for (int j = n - 1; j >= 0; --j) {
      const long i = r % points_;
      r /= points_;
      x(j) = i == points_ - 1 ? params.box.upper(j) : params.box.lower(j) + i * spacing_(j);
    }
    nodes_.push_back(x);
    values_.push_back(F(x));
  }
}

double ConjugateOracle::F(const Vector& x) const {
  return -spec_->objective(x).value + 0.5 * params_.sigma * x.squaredNorm();
}

double ConjugateOracle::refine(const Vector& y, Vector* where) const {
  if (y.size() != spec_->n) throw ContractError("conjugate: y has wrong dimension");
  const int n = spec_->n;
  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double v = y.dot(nodes_[i]) - values_[i];
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  Vector cur = nodes_[best];
  Vector h = spacing_;
  constexpr int zoom = 41;
  while (h.maxCoeff() > params_.refine_spacing) {
    const Vector lo = (cur - 2.0 * h).cwiseMax(params_.box.lower);
    const Vector hi = (cur + 2.0 * h).cwiseMax(lo).cwiseMin(params_.box.upper);
    const Vector step = (hi - lo) / (zoom - 1);
    Vector x(n);
    Vector level_best = cur;
    long total = zoom;
    if (n == 2) total *= zoom;
    for (long flat = 0; flat < total; ++flat) {
      long r = flat;
      for (int j = n - 1; j >= 0; --j) {
        x(j) = lo(j) + static_cast<double>(r % zoom) * step(j);
        r /= zoom;
      }
      const double v = y.dot(x) - F(x);
      if (v > best_val) {
        best_val = v;
        level_best = x;
      }
    }
    cur = level_best;
    h = h / 10.0;
  }
  if (where) *where = cur;
  return best_val;
}

double ConjugateOracle::operator()(const Vector& y) const { return refine(y, nullptr); }

Vector ConjugateOracle::argmax(const Vector& y) const {
  Vector x;
  refine(y, &x);
  return x;
}

double conjugate_value(const ProblemSpec& spec, const PotentialParams& params, const Vector& y) {
  return ConjugateOracle(spec, params)(y);
}

double potential_value(const ProblemSpec& spec, const ConjugateOracle& conj,
                       const PotentialParams& params, const Vector& x, const Vector& y,
                       const Vector& w) {
  if (x.size() != spec.n || y.size() != spec.n || w.size() != spec.n) {
    throw ContractError("potential_value: dimension mismatch");
  }
  if (spec.m() > 0) {
    const ConstraintValues cv = spec.constraints(w);
    const Vector lin = cv.values + cv.jacobian * (x - w);
    for (int i = 0; i < spec.eq_count; ++i) {
      if (std::abs(lin(i)) > 1e-8) return kInf;
    }
    for (int i = spec.eq_count; i < spec.m(); ++i) {
      if (lin(i) < -1e-8) return kInf;
    }
  }
  return -y.dot(x) + conj(y) + 0.5 * params.sigma * x.squaredNorm() +
         0.5 * params.ell * (x - w).squaredNorm();
}

double potential_value(const ProblemSpec& spec, const PotentialParams& params, const Vector& x,
                       const Vector& y, const Vector& w) {
  return potential_value(spec, ConjugateOracle(spec, params), params, x, y, w);
}

// ---------------------------------------------------------------------------
// Descent and subgradient monitors

DescentReport potential_descent_check(const std::vector<IterationRecord>& trace,
                                      const ProblemSpec& spec, const PotentialParams& params,
                                      double b) {
  const std::vector<std::string> violated = potential_premise_violations(spec, params, b);
  if (!violated.empty()) {
    std::string msg = "potential descent premises violated:";
    for (const auto& v : violated) msg += " " + v + ";";
    throw PremiseError(msg);
  }
  const int N = static_cast<int>(trace.size());
  int start = N;
  while (start > 0 && trace[start - 1].max_slack <= kSlackZero) --start;

  DescentReport report;
  report.tail_start = start;
  if (start + 2 >= N) throw InsufficientDataError("potential descent: tail too short");

  const ConjugateOracle conj(spec, params);
  auto z = [&](const IterationRecord& r) -> Vector { return -r.g + params.sigma * r.x; };
  report.min_margin = kInf;
  for (int k = start + 1; k + 1 < N; ++k) {
    DescentStep s;
    s.k = k;
    s.L_k = potential_value(spec, conj, params, trace[k].x, z(trace[k - 1]), trace[k - 1].x);
    s.L_next = potential_value(spec, conj, params, trace[k + 1].x, z(trace[k]), trace[k].x);
    if (std::isinf(s.L_next)) {
      s.difference = -kInf;
    } else if (std::isinf(s.L_k)) {
      s.difference = kInf;
    } else {
      s.difference = s.L_k - s.L_next;
    }
    const double step2 = (trace[k].x - trace[k - 1].x).squaredNorm();
    s.c_d = step2 > 0.0 && std::isfinite(s.difference) ? 2.0 * s.difference / step2 : 0.0;
    report.min_margin = std::min(report.min_margin, s.difference);
    report.steps.push_back(s);
  }
  return report;
}

SubgradientBound subgradient_bound_vector(const ProblemSpec& spec, const IterationRecord& rec_k,
                                          const IterationRecord& rec_k1, const Matrix& B,
                                          const PotentialParams& params,
                                          const ConjugateOracle* conj) {
  if (!spec.hessians && spec.m() > 0) {
    throw CapabilityError("subgradient bound: constraint Hessians are not available");
  }
  const int n = spec.n;
  if (rec_k.lambda.size() != spec.m()) throw ContractError("subgradient bound: lambda size");
  const Vector d = rec_k1.x - rec_k.x;
  Vector curvature = Vector::Zero(n);
  if (spec.m() > 0) {
    const std::vector<Matrix> H = spec.hessians(rec_k.x);
    for (int i = 0; i < spec.m(); ++i) curvature += rec_k.lambda(i) * (H[i] * d);
  }
  SubgradientBound out;
  out.vector.resize(3 * n);
  out.vector.segment(0, n) = params.sigma * d - B * d;
  out.vector.segment(n, n) = -d;
  out.vector.segment(2 * n, n) = -params.ell * d - curvature;
  const double dn = d.norm();
  out.ratio = dn > 0.0 ? out.vector.norm() / dn : 0.0;
  if (n <= 2) {
    std::optional<ConjugateOracle> local;
    if (!conj) conj = &local.emplace(spec, params);
    const Vector zk = -rec_k.g + params.sigma * rec_k.x;
    out.fenchel_young_residual = conj->F(rec_k.x) + (*conj)(zk) - zk.dot(rec_k.x);
  }
  return out;
}

double subgradient_ratio_bound(double sigma, double B_norm, double ell, double lambda_l1,
                               double hessian_norm) {
  const double a = sigma + B_norm;
  const double c = ell + lambda_l1 * hessian_norm;
  return std::sqrt(a * a + 1.0 + c * c);
}

// ---------------------------------------------------------------------------
// Rate fit

RateFit fit_linear_rate(const std::vector<double>& errors) {
  if (errors.size() < 3) throw InsufficientDataError("rate fit needs at least 3 points");
  const std::size_t N = errors.size();
  double kbar = 0.0;
  double ybar = 0.0;
  std::vector<double> y(N);
  for (std::size_t k = 0; k < N; ++k) {
    if (!(errors[k] > 0.0) || !std::isfinite(errors[k])) {
      throw ContractError("rate fit: errors must be positive and finite");
    }
    y[k] = std::log(errors[k]);
    kbar += static_cast<double>(k);
    ybar += y[k];
  }
  kbar /= static_cast<double>(N);
  ybar /= static_cast<double>(N);
  double skk = 0.0;
  double sky = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double dk = static_cast<double>(k) - kbar;
    const double dy = y[k] - ybar;
    skk += dk * dk;
    sky += dk * dy;
    syy += dy * dy;
  }
  const double slope = sky / skk;
  const double intercept = ybar - slope * kbar;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double e = y[k] - (intercept + slope * static_cast<double>(k));
    ss_res += e * e;
  }
  RateFit fit;
  fit.q0 = std::exp(slope);
  fit.q1 = std::exp(intercept);
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.points = static_cast<int>(N);
  return fit;
}

std::vector<double> tail_errors(const std::vector<Vector>& iterates) {
  std::vector<double> out;
  if (iterates.empty()) return out;
  const Vector& last = iterates.back();
  for (std::size_t i = 0; i + 1 < iterates.size(); ++i) {
    const double e = (iterates[i] - last).norm();
    if (e > 0.0) out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MFCQ

MfcqResult check_mfcq(const ProblemSpec& spec, const Vector& x, double active_tol) {
  const Evaluation at = evaluate(spec, x);
  if (constraint_violation(spec, at.c) > active_tol) {
    throw ContractError("check_mfcq: x is not approximately feasible");
  }
  const int n = spec.n;
  const int me = spec.eq_count;
  MfcqResult out;

  const Matrix JE = at.J.topRows(me);
  int rank = 0;
  Eigen::JacobiSVD<Matrix> svd;
  if (me > 0) {
    svd.compute(JE, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-8 * sv(0)) ++rank;
    }
    if (rank < me) {
      out.reason = "equality gradients are linearly dependent";
      return out;
    }
  }

  std::vector<int> active;
  for (int i = me; i < spec.m(); ++i) {
    if (std::abs(at.c(i)) <= active_tol) active.push_back(i);
  }
  if (active.empty()) {
    out.holds = true;
    if (me > 0 && rank < n) {
      out.witness = svd.matrixV().col(rank);
    } else {
      out.witness = Vector::Zero(n);
    }
    out.reason = "no active inequalities";
    return out;
  }

  const int ma = static_cast<int>(active.size());
  Evaluation aux;
  aux.f = 0.0;
  aux.g = Vector::Zero(n);
  aux.c = Vector::Zero(me + ma);
  aux.J.resize(me + ma, n);
  aux.J.topRows(me) = JE;
  for (int j = 0; j < ma; ++j) {
    aux.c(me + j) = -1.0;
    aux.J.row(me + j) = at.J.row(active[j]);
  }
  const QpData qp = assemble(aux, me, ma, Matrix::Identity(n, n), 1e4);
  const QpSolution sol = solve_qp(qp);
  const Vector& w = sol.d;
  const double eq_res = me > 0 ? (JE * w).lpNorm<Eigen::Infinity>() : 0.0;
  const double ineq_min = (aux.J.bottomRows(ma) * w).minCoeff();
  out.witness = w;
  out.holds = eq_res <= 1e-8 * (1.0 + w.norm()) && ineq_min >= 1.0 - 1e-6;
  out.reason = out.holds ? "auxiliary QP feasible" : "auxiliary QP needs slacks";
  return out;
}

// ---------------------------------------------------------------------------
// Trace monitors

namespace {

MonitorResult require_trace(const char* name, const std::vector<IterationRecord>& trace) {
  if (trace.empty()) throw InsufficientDataError(std::string(name) + ": empty trace");
  return MonitorResult{name, true, 0.0, ""};
}

std::string at_k(const char* what, int k) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s at k=%d", what, k);
  return buf;
}

}  // namespace

MonitorResult monitor_multiplier_bounds(const std::vector<IterationRecord>& trace) {
  MonitorResult r = require_trace("multiplier-bounds", trace);
  for (const auto& rec : trace) {
    if (!rec.monitor_flags.multiplier_bounds_ok) {
      if (r.passed) r.detail = at_k("bound violated", rec.k);
      r.passed = false;
      r.margin = std::min(r.margin, -rec.monitor_flags.multiplier_excess);
    }
  }
  return r;
}

MonitorResult monitor_qp_residuals(const std::vector<IterationRecord>& trace) {
  MonitorResult r = require_trace("qp-residuals", trace);
  double worst = 0.0;
  for (const auto& rec : trace) {
    worst = std::max(worst, rec.monitor_flags.qp_residual);
    if (!rec.monitor_flags.qp_residual_ok) {
      if (r.passed) r.detail = at_k("residual above target", rec.k);
      r.passed = false;
    }
  }
  r.margin = r.passed ? 0.0 : -worst;
  if (r.passed) r.detail = fmt("max residual %.3g", worst);
  return r;
}

MonitorResult monitor_line_search(const std::vector<IterationRecord>& trace) {
  MonitorResult r = require_trace("line-search", trace);
  r.margin = kInf;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const auto& rec = trace[i];
    r.margin = std::min(r.margin, rec.monitor_flags.line_search_margin);
    if (!rec.monitor_flags.line_search_ok) {
      if (r.passed) r.detail = at_k("condition failed", rec.k);
      r.passed = false;
    }
  }
  if (!trace.back().monitor_flags.line_search_ok) {
    r.passed = false;
    r.detail = at_k("line search failed", trace.back().k);
  }
  if (!std::isfinite(r.margin)) r.margin = 0.0;
  return r;
}

MonitorResult monitor_merit_decrease(const std::vector<IterationRecord>& trace, double eta,
                                     double slack) {
  MonitorResult r = require_trace("merit-decrease", trace);
  r.margin = kInf;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const auto& a = trace[i];
    const auto& b = trace[i + 1];
    if (a.theta != b.theta) continue;
    const double m = (a.merit - b.merit) - eta * a.alpha * a.model_decrease + slack;
    r.margin = std::min(r.margin, m);
    if (m < 0.0 && r.passed) {
      r.passed = false;
      r.detail = at_k("insufficient decrease", a.k);
    }
  }
  if (!std::isfinite(r.margin)) r.margin = 0.0;
  return r;
}

MonitorResult monitor_theta_tail(const std::vector<IterationRecord>& trace, double fraction) {
  MonitorResult r = require_trace("theta-tail", trace);
  const std::size_t N = trace.size();
  const std::size_t start = N - static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(N)));
  const double final_theta = trace.back().theta;
  for (std::size_t i = start; i < N; ++i) {
    const double dev = std::max(std::abs(trace[i].theta - final_theta),
                                std::abs(trace[i].theta_qp - final_theta));
    if (dev > 0.0) {
      if (r.passed) r.detail = at_k("theta changes", trace[i].k);
      r.passed = false;
      r.margin = std::min(r.margin, -dev);
    }
  }
  if (r.passed) r.detail = fmt("theta = %g over the final %g of records", final_theta, fraction);
  return r;
}

MonitorResult monitor_slack_tail(const std::vector<IterationRecord>& trace, int window,
                                 double tol) {
  MonitorResult r = require_trace("slack-tail", trace);
  const std::size_t N = trace.size();
  const std::size_t start = N > static_cast<std::size_t>(window) ? N - window : 0;
  double worst = 0.0;
  for (std::size_t i = start; i < N; ++i) worst = std::max(worst, trace[i].max_slack);
  r.margin = tol - worst;
  r.passed = worst <= tol;
  r.detail = fmt("max slack %.3g over the final %zu records", worst, N - start);
  return r;
}

MonitorResult monitor_full_step(const std::vector<IterationRecord>& trace, double tol) {
  MonitorResult r = require_trace("full-step", trace);
  std::size_t first = trace.size();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].max_slack <= tol) {
      first = i;
      break;
    }
  }
  if (first == trace.size()) {
    r.passed = false;
    r.detail = "slacks never vanish";
    return r;
  }
  double min_alpha = 1.0;
  for (std::size_t i = first; i + 1 < trace.size(); ++i) {
    min_alpha = std::min(min_alpha, trace[i].alpha);
    if (trace[i].alpha != 1.0 && r.passed) {
      r.passed = false;
      r.detail = at_k("backtracked", trace[i].k);
    }
  }
  r.margin = min_alpha - 1.0;
  if (r.passed) r.detail = at_k("alpha = 1 from", trace[first].k);
  return r;
}

MonitorResult monitor_step_lower_bound(const std::vector<IterationRecord>& trace,
                                       const ProblemSpec& spec, double tau, double b) {
  MonitorResult r = require_trace("step-lower-bound", trace);
  if (!spec.rho || !spec.lip_h) throw CapabilityError("step lower bound needs rho and H");
  const double theta = trace.back().theta;
  std::size_t start = trace.size() - 1;
  while (start > 0 && trace[start - 1].theta == theta && trace[start - 1].theta_qp == theta) {
    --start;
  }
  const double ratio = b / (*spec.rho + theta * spec.m() * *spec.lip_h);
  const double expo = std::max(0.0, std::ceil(std::log(ratio) / std::log(tau)));
  const double bound = std::pow(tau, expo);
  double min_alpha = 1.0;
  for (std::size_t i = start; i + 1 < trace.size(); ++i) min_alpha = std::min(min_alpha, trace[i].alpha);
  r.margin = min_alpha - bound;
  r.passed = r.margin >= 0.0;
  r.detail = fmt("min alpha %g, bound %g", min_alpha, bound);
  return r;
}

MonitorResult monitor_step_vanishing(const std::vector<IterationRecord>& trace, double eps) {
  MonitorResult r = require_trace("step-vanishing", trace);
  const std::size_t N = trace.size();
  const std::size_t start = N > 10 ? N - 10 : 0;
  double tail_max = 0.0;
  bool monotone = true;
  for (std::size_t i = start; i < N; ++i) {
    tail_max = std::max(tail_max, trace[i].step_norm);
    if (i > start && trace[i].step_norm > trace[i - 1].step_norm * (1.0 + 1e-6)) monotone = false;
  }
  const double last = trace.back().step_norm;
  const bool bounded = tail_max <= 10.0 * eps;
  r.margin = eps - last;
  r.passed = last <= eps && (bounded || monotone);
  r.detail = fmt("final |d| %.3g, tail max %.3g (%s)", last, tail_max,
                 bounded ? "within 10 eps" : monotone ? "non-increasing" : "not monotone");
  return r;
}

MonitorResult monitor_kkt(const std::vector<IterationRecord>& trace, double tol) {
  MonitorResult r = require_trace("kkt", trace);
  const double worst = trace.back().kkt.max();
  r.margin = tol - worst;
  r.passed = worst <= tol;
  r.detail = fmt("final KKT residual %.3g (tol %g)", worst, tol);
  return r;
}

MonitorResult monitor_potential_descent(const std::vector<IterationRecord>& trace,
                                        const ProblemSpec& spec, const PotentialParams& params,
                                        double b) {
  MonitorResult r = require_trace("potential-descent", trace);
  const DescentReport rep = potential_descent_check(trace, spec, params, b);
  r.margin = rep.min_margin + kGridErrorBudget;
  r.passed = r.margin >= 0.0;
  r.detail = fmt("min L difference %.3g over %zu steps from k=%d", rep.min_margin,
                 rep.steps.size(), rep.tail_start + 1);
  return r;
}

MonitorResult monitor_subgradient_bound(const std::vector<IterationRecord>& trace,
                                        const ProblemSpec& spec, const PotentialParams& params) {
  MonitorResult r = require_trace("subgradient-bound", trace);
  const std::size_t N = trace.size();
  std::size_t start = N;
  while (start > 0 && trace[start - 1].max_slack <= kSlackZero) --start;
  if (start + 1 >= N) throw InsufficientDataError("subgradient bound: tail too short");

  std::optional<ConjugateOracle> conj;
  if (spec.n <= 2) conj.emplace(spec, params);
  double max_ratio = 0.0;
  double max_b = 0.0;
  double max_lambda = 0.0;
  double max_hess = 0.0;
  double worst_fy = 0.0;
  for (std::size_t i = start; i + 1 < N; ++i) {
    const auto& rec = trace[i];
    const int n = spec.n;
    const Matrix B = rec.b_min * Matrix::Identity(n, n);
    const SubgradientBound sb =
        subgradient_bound_vector(spec, rec, trace[i + 1], B, params, conj ? &*conj : nullptr);
    max_ratio = std::max(max_ratio, sb.ratio);
    max_b = std::max(max_b, rec.b_min);
    max_lambda = std::max(max_lambda, rec.lambda.lpNorm<1>());
    if (spec.m() > 0) {
      for (const Matrix& H : spec.hessians(rec.x)) {
        max_hess = std::max(max_hess, Eigen::JacobiSVD<Matrix>(H).singularValues()(0));
      }
    }
    if (sb.fenchel_young_residual) worst_fy = std::max(worst_fy, std::abs(*sb.fenchel_young_residual));
  }
  const double bound =
      subgradient_ratio_bound(params.sigma, max_b, params.ell, max_lambda, max_hess);
  r.margin = std::min(bound - max_ratio, kGridErrorBudget - worst_fy);
  r.passed = r.margin >= 0.0;
  r.detail = fmt("max ratio %.4g <= %.4g; Fenchel-Young residual %.3g", max_ratio, bound,
                 worst_fy);
  return r;
}

MonitorResult monitor_mfcq(const std::vector<IterationRecord>& trace, const ProblemSpec& spec,
                           double active_tol) {
  MonitorResult r = require_trace("mfcq", trace);
  const MfcqResult res = check_mfcq(spec, trace.back().x, active_tol);
  r.passed = res.holds;
  r.margin = res.holds ? 0.0 : -1.0;
  r.detail = res.reason;
  return r;
}

}  // namespace nsqp
