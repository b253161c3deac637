#include <sslide/ident.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

namespace sslide {

Trace simulate_experiment(const IdentProblem& problem, const IdentParams& params, double sample_period,
                          double duration) {
  TaskModel task = problem.ctx.task;
  task.mu = params.mu;
  std::vector<FingerSetup> fingers(2);
  for (int i = 0; i < 2; ++i) {
    fingers[i].stiffness = StiffnessModel::constant(params.K[i]);
    fingers[i].s0 = problem.ctx.s_at_height(i, problem.initial_heights[i]);
  }
  const HandModel& hand = problem.ctx.hand;
  const auto& path = problem.hand_path;
  AnchorTrajectory anchors = [&hand, &path](double t) {
    AnchorSample a;
    a.hand = path(t);
    a.anchors = hand.anchors(a.hand);
    return a;
  };
  SimOptions opts;
  opts.dt = problem.dt;
  opts.sample_period = sample_period;
  opts.duration = duration;
  opts.compute_margin = false;
  return simulate(task, fingers, anchors, stationary_object(problem.ctx.pose), opts);
}

IdentObservations observations_from(const Trace& trace) {
  IdentObservations obs;
  for (const auto& r : trace.rows) {
    obs.t.push_back(r.t);
    obs.tips_body.push_back({r.tips_body.at(0), r.tips_body.at(1)});
  }
  return obs;
}

double residual(const IdentProblem& problem, const IdentParams& params) {
  const auto& obs = problem.obs;
  if (obs.t.size() < 2) throw DomainError("ident", "need at least two observations");
  const double sp = obs.t[1] - obs.t[0];
  Trace tr;
  try {
    tr = simulate_experiment(problem, params, sp, obs.t.back());
  } catch (const Error&) {
    return IdentProblem::kPenalty;
  }
  if (tr.rows.size() != obs.t.size()) throw DomainError("ident", "observation times do not match the sampling grid");
  double r = 0.0;
  for (std::size_t k = 0; k < obs.t.size(); ++k) {
    if (std::abs(tr.rows[k].t - obs.t[k]) > 1e-6 * sp)
      throw DomainError("ident", "observation times must be uniformly sampled from the first sample period");
    for (int i = 0; i < 2; ++i) r += (tr.rows[k].tips_body[i] - obs.tips_body[k][i]).cwiseAbs().sum();
  }
  return r;
}

VecX pack(const IdentParams& p, bool off_diagonal) {
  if (!off_diagonal) {
    VecX x(5);
    x << p.mu, p.K[0](0, 0), p.K[0](1, 1), p.K[1](0, 0), p.K[1](1, 1);
    return x;
  }
  VecX x(7);
  x[0] = p.mu;
  for (int i = 0; i < 2; ++i) {
    const Mat2 L = Eigen::LLT<Mat2>(p.K[i]).matrixL();
    x.segment<3>(1 + 3 * i) << L(0, 0), L(1, 0), L(1, 1);
  }
  return x;
}

IdentParams unpack(const VecX& x, bool off_diagonal) {
  IdentParams p;
  p.mu = x[0];
  if (!off_diagonal) {
    p.K[0] = Vec2(x[1], x[2]).asDiagonal();
    p.K[1] = Vec2(x[3], x[4]).asDiagonal();
    return p;
  }
  for (int i = 0; i < 2; ++i) {
    Mat2 L = Mat2::Zero();
    L(0, 0) = x[1 + 3 * i];
    L(1, 0) = x[2 + 3 * i];
    L(1, 1) = x[3 + 3 * i];
    p.K[i] = L * L.transpose();
  }
  return p;
}

NelderMeadResult nelder_mead(const std::function<double(const VecX&)>& f, const VecX& x0, const VecX& step,
                             const VecX& lo, const VecX& hi, int max_evaluations, double xtol, int jobs) {
  const int n = static_cast<int>(x0.size());
  auto clip = [&](VecX x) { return VecX(x.cwiseMax(lo).cwiseMin(hi)); };
  NelderMeadResult res;
  auto eval_many = [&](const std::vector<VecX>& xs) {
    std::vector<double> out(xs.size());
    if (jobs > 1) {
      std::vector<std::future<double>> fut;
      for (const auto& x : xs) fut.push_back(std::async(std::launch::async, f, x));
      for (std::size_t i = 0; i < xs.size(); ++i) out[i] = fut[i].get();
    } else {
      for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
    }
    res.evaluations += static_cast<int>(xs.size());
    return out;
  };

  std::vector<VecX> X;
  std::vector<double> F;
  auto build = [&](const VecX& center, double f_center) {
    X.assign(1, clip(center));
    for (int i = 0; i < n; ++i) {
      VecX x = X[0];
      x[i] += x[i] + step[i] > hi[i] ? -step[i] : step[i];
      X.push_back(clip(x));
    }
    const std::vector<VecX> rest(X.begin() + 1, X.end());
    F.assign(1, f_center);
    for (double v : eval_many(rest)) F.push_back(v);
  };
  build(x0, eval_many({clip(x0)})[0]);
  double best_seen = F[0];
  double restart_best = F[0];
  const double f_start = F[0];
  int restarts = 0;

  std::vector<int> order(n + 1);
  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return F[a] < F[b]; });
    {
      std::vector<VecX> X2;
      std::vector<double> F2;
      for (int k : order) {
        X2.push_back(X[k]);
        F2.push_back(F[k]);
      }
      X.swap(X2);
      F.swap(F2);
    }
    if (F[0] < best_seen) {
      best_seen = F[0];
      ++res.improvements;
    }
    double size = 0.0;
    for (int i = 1; i <= n; ++i)
      size = std::max(size, ((X[i] - X[0]).cwiseAbs().array() / (X[0].cwiseAbs().array() + 1e-12)).maxCoeff());
    if (size <= xtol || F[n] - F[0] <= 1e-15 * std::max(1.0, std::abs(F[0]))) {
      // Restart around the best vertex; a collapsed simplex can stall on a bound.
      const bool stalled = restarts > 0 && !(F[0] < (1.0 - 1e-3) * restart_best);
      if (stalled || restarts == 5 || F[0] <= 1e-9 * f_start || res.evaluations + n > max_evaluations) {
        res.converged = true;
        break;
      }
      ++restarts;
      restart_best = F[0];
      build(X[0], F[0]);
      continue;
    }
    if (res.evaluations >= max_evaluations) break;
    ++res.iterations;

    VecX c = VecX::Zero(n);
    for (int i = 0; i < n; ++i) c += X[i];
    c /= n;
    const VecX xr = clip(c + (c - X[n]));
    const double fr = eval_many({xr})[0];
    if (fr < F[0]) {
      const VecX xe = clip(c + 2.0 * (c - X[n]));
      const double fe = eval_many({xe})[0];
      if (fe < fr) {
        X[n] = xe;
        F[n] = fe;
      } else {
        X[n] = xr;
        F[n] = fr;
      }
      continue;
    }
    if (fr < F[n - 1]) {
      X[n] = xr;
      F[n] = fr;
      continue;
    }
    const bool outside = fr < F[n];
    const VecX xc = outside ? clip(c + 0.5 * (xr - c)) : clip(c + 0.5 * (X[n] - c));
    const double fc = eval_many({xc})[0];
    if (fc < (outside ? fr : F[n])) {
      X[n] = xc;
      F[n] = fc;
      continue;
    }
    std::vector<VecX> shrunk;
    for (int i = 1; i <= n; ++i) shrunk.push_back(clip(X[0] + 0.5 * (X[i] - X[0])));
    const std::vector<double> fs = eval_many(shrunk);
    for (int i = 1; i <= n; ++i) {
      X[i] = shrunk[i - 1];
      F[i] = fs[i - 1];
    }
  }
  const int b = static_cast<int>(std::min_element(F.begin(), F.end()) - F.begin());
  res.x = X[b];
  res.f = F[b];
  return res;
}

IdentResult fit(const IdentProblem& problem) {
  for (const auto& k : problem.guess.K) {
    if ((k - k.transpose()).norm() > 1e-12 * k.norm()) throw DomainError("ident", "initial stiffness must be symmetric");
    if (Eigen::SelfAdjointEigenSolver<Mat2>(k).eigenvalues().minCoeff() <= 0.0)
      throw DomainError("ident", "initial stiffness must be positive definite");
  }
  const bool od = problem.off_diagonal;
  const VecX x0 = pack(problem.guess, od);
  const int n = static_cast<int>(x0.size());
  VecX lo(n), hi(n), step(n);
  lo[0] = problem.mu_bounds[0];
  hi[0] = problem.mu_bounds[1];
  for (int i = 1; i < n; ++i) {
    const bool offdiag_entry = od && (i == 2 || i == 5);
    const double ksq_lo = std::sqrt(problem.k_bounds[0]), ksq_hi = std::sqrt(problem.k_bounds[1]);
    lo[i] = od ? (offdiag_entry ? -ksq_hi : ksq_lo) : problem.k_bounds[0];
    hi[i] = od ? ksq_hi : problem.k_bounds[1];
  }
  for (int i = 0; i < n; ++i) step[i] = x0[i] != 0.0 ? 0.05 * x0[i] : 0.05 * (od ? 1.0 : 0.01);

  auto f = [&](const VecX& x) { return residual(problem, unpack(x, od)); };
  const NelderMeadResult nm = nelder_mead(f, x0, step, lo, hi, problem.max_evaluations, problem.xtol, problem.jobs);
  IdentResult out;
  out.params = unpack(nm.x, od);
  out.residual = nm.f;
  out.iterations = nm.iterations;
  out.improvements = nm.improvements;
  out.evaluations = nm.evaluations;
  out.converged = nm.converged;
  out.initial_residual = residual(problem, problem.guess);
  ++out.evaluations;
  return out;
}

}  // namespace sslide
