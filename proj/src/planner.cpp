#include <sslide/planner.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace sslide {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

double golden_min(const std::function<double(double)>& f, double a, double b, int iters, double* fbest) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < iters; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  if (fc <= fd) {
    *fbest = fc;
    return c;
  }
  *fbest = fd;
  return d;
}

}  // namespace

std::vector<Vec2> HandModel::anchors(const Vec2& p_h) const {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < anchor_offsets.size(); ++i) out.push_back(anchor(static_cast<int>(i), p_h));
  return out;
}

std::array<double, 2> PlanContext::face_range(int finger) const {
  const auto& piece = task.boundary.pieces().at(faces[finger]);
  double lo = kInf, hi = -kInf;
  const int n = 2000;
  for (int k = 0; k <= n; ++k) {
    const double y = piece.point_at(piece.length() * k / n).y();
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  return {lo, hi};
}

ContactEdge contact_edge(const PlanContext& ctx, int finger, double y, int dir) {
  const double s = ctx.s_at_height(finger, y);
  const SurfacePoint sp = ctx.task.boundary.query(s);
  if (sp.tangent.y() == 0.0) throw GeometryError("planner", "face is horizontal at the requested height");
  const Mat2 r = ctx.pose.rotation();
  ContactEdge c;
  c.tip = ctx.pose.to_world(sp.position);
  c.normal = r * sp.normal;
  c.slide = r * (sgn(sp.tangent.y()) == dir ? sp.tangent : Vec2(-sp.tangent));
  c.edge = (c.normal + ctx.task.mu * c.slide).normalized();
  return c;
}

HandSolution hand_from_contacts(const TaskModel& task, const HandModel& hand, const std::array<ContactEdge, 2>& c) {
  (void)task;
  if (hand.anchor_offsets.size() != 2 || hand.stiffness.size() != 2)
    throw DomainError("planner", "the hand model needs two anchors and two stiffness matrices");
  const Mat2 rh = rot2(hand.rotation);
  Mat2 A;
  Vec2 b;
  for (int i = 0; i < 2; ++i) {
    const Eigen::RowVector2d row = perp(c[i].edge).transpose() * hand.stiffness[i];
    A.row(i) = row;
    b[i] = row.dot(c[i].tip - rh * hand.anchor_offsets[i]);
  }
  const double scale = A.row(0).norm() * A.row(1).norm();
  if (!(std::abs(A.determinant()) > 1e-12 * scale))
    throw GeometryError("planner", "hand_from_contacts: cone-edge constraints are parallel (singular system)");
  HandSolution sol;
  sol.p_h = A.partialPivLu().solve(b);
  sol.pushing = true;
  for (int i = 0; i < 2; ++i) {
    sol.tips[i] = c[i].tip;
    sol.forces[i] = -hand.stiffness[i] * (c[i].tip - hand.anchor(i, sol.p_h));
    if (!(sol.forces[i].dot(c[i].normal) > 0.0 && sol.forces[i].dot(c[i].edge) > 0.0)) sol.pushing = false;
  }
  return sol;
}

HandSolution hand_from_heights(const PlanContext& ctx, double y1, double y2, const SlideDirs& dirs) {
  return hand_from_contacts(ctx.task, ctx.hand,
                            {contact_edge(ctx, 0, y1, dirs[0]), contact_edge(ctx, 1, y2, dirs[1])});
}

FCPoint evaluate_point(const PlanContext& ctx, double y1, double y2, const SlideDirs& dirs, const MatX& W,
                       const MatX& normals) {
  FCPoint p;
  p.y1 = y1;
  p.y2 = y2;
  HandSolution hs;
  try {
    hs = hand_from_heights(ctx, y1, y2, dirs);
  } catch (const GeometryError&) {
    return p;
  }
  p.p_h = hs.p_h;
  p.forces = hs.forces;
  if (!hs.pushing) return p;
  Vec3 wc = Vec3::Zero();
  for (int i = 0; i < 2; ++i) wc += contact_wrench(hs.tips[i], hs.forces[i], ctx.task.characteristic_length);
  const Vec3 wg = scaled_gravity(ctx.task);
  p.margin = cone_margin(normals, -wc - wg);
  p.feasible = balance_lp(W, wc, wg).has_value();
  return p;
}

FCPoint evaluate_point(const PlanContext& ctx, double y1, double y2, const SlideDirs& dirs) {
  const WrenchCone cone = build_external_cone(ctx.task, ctx.pose);
  return evaluate_point(ctx, y1, y2, dirs, cone.W, facet_normals(cone.W));
}

GridSpec default_grid(const PlanContext& ctx, double step) {
  if (!(step > 0.0)) throw DomainError("planner", "grid step must be positive");
  GridSpec g;
  g.step = step;
  const auto r1 = ctx.face_range(0), r2 = ctx.face_range(1);
  g.y1_lo = std::ceil(r1[0] / step - 1e-9) * step;
  g.y1_hi = std::floor(r1[1] / step + 1e-9) * step;
  g.y2_lo = std::ceil(r2[0] / step - 1e-9) * step;
  g.y2_hi = std::floor(r2[1] / step + 1e-9) * step;
  return g;
}

namespace {

std::vector<double> grid_values(double lo, double hi, double step) {
  const long k0 = std::lround(std::ceil(lo / step - 1e-9));
  const long k1 = std::lround(std::floor(hi / step + 1e-9));
  std::vector<double> v;
  for (long k = k0; k <= k1; ++k) v.push_back(k * step);
  return v;
}

}  // namespace

std::optional<std::pair<std::size_t, std::size_t>> FCMap::nearest(double a, double b) const {
  if (y1.empty() || y2.empty()) return std::nullopt;
  auto idx = [](const std::vector<double>& v, double x) {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    std::size_t i = static_cast<std::size_t>(it - v.begin());
    if (i == v.size()) return v.size() - 1;
    if (i > 0 && std::abs(v[i - 1] - x) <= std::abs(v[i] - x)) return i - 1;
    return i;
  };
  return std::make_pair(idx(y1, a), idx(y2, b));
}

int FCMap::label_at(double a, double b) const {
  const auto n = nearest(a, b);
  if (!n) return 0;
  return labels[n->first * y2.size() + n->second];
}

bool FCMap::connected(const Vec2& a, const Vec2& b) const {
  const int la = label_at(a.x(), a.y());
  return la != 0 && la == label_at(b.x(), b.y());
}

FCMap fcmap(const PlanContext& ctx, const GridSpec& grid, const SlideDirs& dirs) {
  if (!(grid.step > 0.0)) throw DomainError("planner", "grid step must be positive");
  FCMap map;
  map.y1 = grid_values(grid.y1_lo, grid.y1_hi, grid.step);
  map.y2 = grid_values(grid.y2_lo, grid.y2_hi, grid.step);
  const WrenchCone cone = build_external_cone(ctx.task, ctx.pose);
  const MatX normals = facet_normals(cone.W);
  map.cells.reserve(map.y1.size() * map.y2.size());
  for (double a : map.y1)
    for (double b : map.y2) map.cells.push_back(evaluate_point(ctx, a, b, dirs, cone.W, normals));

  const std::size_t n1 = map.y1.size(), n2 = map.y2.size();
  map.labels.assign(n1 * n2, 0);
  int next = 0;
  for (std::size_t start = 0; start < map.cells.size(); ++start) {
    if (!map.cells[start].feasible || map.labels[start] != 0) continue;
    ++next;
    std::deque<std::size_t> queue{start};
    map.labels[start] = next;
    while (!queue.empty()) {
      const std::size_t c = queue.front();
      queue.pop_front();
      const std::size_t i = c / n2, j = c % n2;
      const std::size_t nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& q : nb) {
        if (q[0] >= n1 || q[1] >= n2) continue;  // unsigned wrap covers the lower edge
        const std::size_t k = q[0] * n2 + q[1];
        if (map.cells[k].feasible && map.labels[k] == 0) {
          map.labels[k] = next;
          queue.push_back(k);
        }
      }
    }
  }
  return map;
}

std::vector<XiPoint> xi_star(const PlanContext& ctx, double y1_lo, double y1_hi, double step, const SlideDirs& dirs,
                             double y2_lo, double y2_hi) {
  if (!(step > 0.0)) throw DomainError("planner", "xi_star step must be positive");
  const WrenchCone cone = build_external_cone(ctx.task, ctx.pose);
  const MatX normals = facet_normals(cone.W);
  const std::vector<double> ys1 = grid_values(y1_lo, y1_hi, step);
  const std::vector<double> ys2 = grid_values(y2_lo, y2_hi, step);
  std::vector<XiPoint> out;
  for (double a : ys1) {
    double best = -kInf;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < ys2.size(); ++j) {
      const FCPoint p = evaluate_point(ctx, a, ys2[j], dirs, cone.W, normals);
      if (p.feasible && p.margin > best) {
        best = p.margin;
        best_j = j;
      }
    }
    if (best == -kInf) continue;
    // Continuous refinement around the best grid value.
    const double lo = std::max(y2_lo, ys2[best_j] - step);
    const double hi = std::min(y2_hi, ys2[best_j] + step);
    auto neg_margin = [&](double b) {
      const FCPoint p = evaluate_point(ctx, a, b, dirs, cone.W, normals);
      return p.margin > -kInf ? -p.margin : kInf;
    };
    double fb = 0.0;
    const double b = golden_min(neg_margin, lo, hi, 48, &fb);
    XiPoint xp{a, ys2[best_j], best};
    if (-fb > best) {
      const FCPoint p = evaluate_point(ctx, a, b, dirs, cone.W, normals);
      if (p.feasible) xp = {a, b, p.margin};
    }
    out.push_back(xp);
  }
  return out;
}

Vec2 Cubic2::eval(double tau) const { return c[0] + tau * (c[1] + tau * (c[2] + tau * c[3])); }
Vec2 Cubic2::deriv(double tau) const { return c[1] + tau * (2.0 * c[2] + 3.0 * tau * c[3]); }

Cubic2 Cubic2::rest_to_rest(const Vec2& p0, const Vec2& p1, double T) {
  return rest_to_velocity(p0, p1, Vec2::Zero(), T);
}

Cubic2 Cubic2::rest_to_velocity(const Vec2& p0, const Vec2& p1, const Vec2& v1, double T) {
  if (!(T > 0.0)) throw DomainError("planner", "cubic duration must be positive");
  const Vec2 d = p1 - p0;
  Cubic2 q;
  q.duration = T;
  q.c = {p0, Vec2::Zero(), Vec2((3.0 * d - v1 * T) / (T * T)), Vec2((v1 * T - 2.0 * d) / (T * T * T))};
  return q;
}

Cubic2 Cubic2::velocity_to_rest(const Vec2& p0, const Vec2& v0, const Vec2& p1, double T) {
  if (!(T > 0.0)) throw DomainError("planner", "cubic duration must be positive");
  const Vec2 d = p1 - p0;
  Cubic2 q;
  q.duration = T;
  q.c = {p0, v0, Vec2((3.0 * d - 2.0 * v0 * T) / (T * T)), Vec2((v0 * T - 2.0 * d) / (T * T * T))};
  return q;
}

Cubic2 phase1_plan(const Vec2& p_h0, const Vec2& p_hS, double T1) { return Cubic2::rest_to_rest(p_h0, p_hS, T1); }

Cubic2 phase3_plan(const Vec2& p_hG, const Vec2& p_h_relaxed, double T3) {
  return phase1_plan(p_hG, p_h_relaxed, T3);
}

Vec2 Phase2Plan::xi(double tau) const {
  tau = std::clamp(tau, 0.0, duration());
  if (tau <= dT21) return piece1.eval(tau);
  if (tau <= dT21 + dT22) {
    const double s = std::min(v2 * (tau - dT21), path_s.back());
    auto it = std::upper_bound(path_s.begin(), path_s.end(), s);
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - path_s.begin()), path.size() - 1);
    if (k == 0) return path.front();
    const double seg = path_s[k] - path_s[k - 1];
    const double u = seg > 0.0 ? (s - path_s[k - 1]) / seg : 0.0;
    return path[k - 1] + u * (path[k] - path[k - 1]);
  }
  return piece3.eval(tau - dT21 - dT22);
}

Vec2 Phase2Plan::xi_dot(double tau) const {
  tau = std::clamp(tau, 0.0, duration());
  if (tau < dT21) return piece1.deriv(tau);
  if (tau < dT21 + dT22) {
    const double s = v2 * (tau - dT21);
    auto it = std::upper_bound(path_s.begin(), path_s.end(), s);
    std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - path_s.begin()), 1, path.size() - 1);
    return v2 * (path[k] - path[k - 1]).normalized();
  }
  return piece3.deriv(tau - dT21 - dT22);
}

namespace {

// Peak of |x1'| + |x2'| over a cubic that starts at rest, moves by a total
// of D (sum of absolute components) and ends with w (sum of absolute speeds).
double cubic_peak(double D, double w, double T) {
  const double a = 6.0 * D / T - 2.0 * w;  // V(u) = u (a + b u)
  const double b = 3.0 * w - 6.0 * D / T;
  double v = w;
  if (b < 0.0) {
    const double u = -a / (2.0 * b);
    if (u > 0.0 && u < 1.0) v = std::max(v, u * (a + b * u));
  }
  return v;
}

struct PairData {
  double L2, c2;
  Vec2 ds, dg, ts, tg;
  SlideDirs d;
};

// Minimal peak speed over duration splits; +inf when infeasible.
double min_peak(const PairData& p, double total, double m, double* T21, double* T23) {
  auto piece_ok = [&](const Vec2& delta, const Vec2& tan, double v2, double T) {
    for (int i = 0; i < 2; ++i) {
      if (sgn(delta[i]) != p.d[i]) return false;
      if (tan[i] != 0.0 && sgn(tan[i]) != p.d[i]) return false;
      if (v2 * std::abs(tan[i]) * T > 3.0 * std::abs(delta[i])) return false;
    }
    return true;
  };
  auto feasible = [&](double t21, double t23) {
    const double t22 = total - t21 - t23;
    if (t22 < m - 1e-12) return false;
    const double v2 = p.L2 / t22;
    return piece_ok(p.ds, p.ts, v2, t21) && piece_ok(p.dg, p.tg, v2, t23);
  };
  auto peak = [&](double t21, double t23) {
    const double v2 = p.L2 / (total - t21 - t23);
    const double w1 = v2 * (p.d[0] * p.ts[0] + p.d[1] * p.ts[1]);
    const double w3 = v2 * (p.d[0] * p.tg[0] + p.d[1] * p.tg[1]);
    const double D1 = p.d[0] * p.ds[0] + p.d[1] * p.ds[1];
    const double D3 = p.d[0] * p.dg[0] + p.d[1] * p.dg[1];
    return std::max({cubic_peak(D1, w1, t21), v2 * p.c2, cubic_peak(D3, w3, t23)});
  };
  // For fixed t23 the feasible t21 form an interval [m, hi].
  auto inner = [&](double t23, double* t21_out) {
    if (!feasible(m, t23)) return kInf;
    double lo = m, hi = total - t23 - m;
    if (!feasible(hi, t23)) {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid, t23)) lo = mid;
        else hi = mid;
      }
      hi = lo;
    }
    if (hi - m < 1e-12) {
      *t21_out = m;
      return peak(m, t23);
    }
    double fb = 0.0;
    const double t = golden_min([&](double t21) { return peak(t21, t23); }, m, hi, 40, &fb);
    const double fm = peak(m, t23), fh = peak(hi, t23);
    if (fm <= fb && fm <= fh) {
      *t21_out = m;
      return fm;
    }
    if (fh < fb) {
      *t21_out = hi;
      return fh;
    }
    *t21_out = t;
    return fb;
  };

  const int coarse = 12;
  const double span = total - 3.0 * m;
  if (span < 0.0) return kInf;
  double best = kInf, best23 = m, best21 = m;
  int best_k = -1;
  for (int k = 0; k <= coarse; ++k) {
    const double t23 = m + span * k / coarse;
    double t21 = m;
    const double v = inner(t23, &t21);
    if (v < best) {
      best = v;
      best23 = t23;
      best21 = t21;
      best_k = k;
    }
  }
  if (best_k < 0) return kInf;
  const double lo = m + span * std::max(0, best_k - 1) / coarse;
  const double hi = m + span * std::min(coarse, best_k + 1) / coarse;
  double fb = 0.0;
  const double t23 = golden_min(
      [&](double t) {
        double t21 = m;
        return inner(t, &t21);
      },
      lo, hi, 32, &fb);
  if (fb < best) {
    best = fb;
    best23 = t23;
    inner(t23, &best21);
  }
  *T21 = best21;
  *T23 = best23;
  return best;
}

}  // namespace

Phase2Plan phase2_plan(const Vec2& S, const Vec2& G, const std::vector<XiPoint>& xi, double total, double kappa,
                       double min_duration) {
  const SlideDirs d{sgn(G.x() - S.x()), sgn(G.y() - S.y())};
  if (d[0] == 0 || d[1] == 0)
    throw PlanningError("planner", "phase 2 needs both fingertips to move (G differs from S in each component)");
  if (!(total >= 3.0 * min_duration)) throw PlanningError("planner", "phase 2 duration is too short");
  if (xi.size() < 2) throw PlanningError("planner", "optimal curve has fewer than two points");

  std::vector<Vec2> P;
  for (const auto& x : xi) P.emplace_back(x.y1, x.y2);
  std::sort(P.begin(), P.end(), [&](const Vec2& a, const Vec2& b) { return d[0] > 0 ? a.x() < b.x() : a.x() > b.x(); });
  const std::size_t n = P.size();
  std::vector<double> arc(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) arc[k] = arc[k - 1] + (P[k] - P[k - 1]).norm();
  std::vector<int> bad_prefix(n, 0);  // bad segments among 0..k-1
  std::vector<double> seg_l1(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vec2 s = P[k + 1] - P[k];
    const bool ok = sgn(s.x()) == d[0] && sgn(s.y()) == d[1];
    bad_prefix[k + 1] = bad_prefix[k] + (ok ? 0 : 1);
    seg_l1[k] = s.norm() > 0.0 ? s.cwiseAbs().sum() / s.norm() : 0.0;
  }
  auto tangent = [&](std::size_t k) {
    const Vec2 t = P[std::min(k + 1, n - 1)] - P[k == 0 ? 0 : k - 1];
    return Vec2(t.normalized());
  };

  Phase2Plan best;
  best.objective = -kInf;
  bool found = false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 ds = P[i] - S;
    if (sgn(ds.x()) != d[0] || sgn(ds.y()) != d[1]) continue;
    double c2 = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      c2 = std::max(c2, seg_l1[j - 1]);
      if (bad_prefix[j] - bad_prefix[i] > 0) break;
      const Vec2 dg = G - P[j];
      if (sgn(dg.x()) != d[0] || sgn(dg.y()) != d[1]) continue;
      PairData pd{arc[j] - arc[i], c2, ds, dg, tangent(i), tangent(j), d};
      double t21 = 0.0, t23 = 0.0;
      const double V = min_peak(pd, total, min_duration, &t21, &t23);
      if (V == kInf) continue;
      const double obj = pd.L2 - kappa * V;
      if (!found || obj > best.objective) {
        found = true;
        best.objective = obj;
        best.V_max = V;
        best.L2 = pd.L2;
        best.dT21 = t21;
        best.dT23 = t23;
        best.dT22 = total - t21 - t23;
        best.Sp = P[i];
        best.Gp = P[j];
        best.path.assign(P.begin() + static_cast<long>(i), P.begin() + static_cast<long>(j) + 1);
        best.v2 = pd.L2 / best.dT22;
        best.v_s = best.v2 * pd.ts;
        best.v_g = best.v2 * pd.tg;
      }
    }
  }
  if (!found)
    throw PlanningError("planner", "no feasible S', G' pair on the optimal curve satisfies the monotone-sliding "
                                   "constraints");
  best.S = S;
  best.G = G;
  best.kappa = kappa;
  best.path_s.assign(1, 0.0);
  for (std::size_t k = 1; k < best.path.size(); ++k)
    best.path_s.push_back(best.path_s.back() + (best.path[k] - best.path[k - 1]).norm());
  best.piece1 = Cubic2::rest_to_velocity(S, best.Sp, best.v_s, best.dT21);
  best.piece3 = Cubic2::velocity_to_rest(best.Gp, best.v_g, G, best.dT23);
  return best;
}

Vec2 RegraspPlan::xi_at(double t) const {
  if (t <= spec.T1 || !has_phase2) return spec.S;
  return phase2.xi(t - spec.T1);
}

Vec2 plan_hand(const PlanContext& ctx, const RegraspPlan& plan, double t) {
  if (t <= plan.T1()) return plan.phase1.eval(std::max(0.0, t));
  if (!plan.has_phase2) return plan.p_hS;
  const Vec2 y = plan.phase2.xi(t - plan.T1());
  return hand_from_heights(ctx, y.x(), y.y(), plan.dirs).p_h;
}

AnchorTrajectory plan_anchor_trajectory(const PlanContext& ctx, const RegraspPlan& plan) {
  return [&ctx, &plan](double t) {
    AnchorSample a;
    a.hand = plan_hand(ctx, plan, t);
    a.anchors = ctx.hand.anchors(a.hand);
    return a;
  };
}

std::vector<FingerSetup> plan_fingers(const PlanContext& ctx, const RegraspPlan& plan) {
  std::vector<FingerSetup> f(2);
  for (int i = 0; i < 2; ++i) {
    f[i].stiffness = StiffnessModel::constant(ctx.hand.stiffness[i]);
    f[i].s0 = ctx.s_at_height(i, plan.spec.S[i]);
  }
  return f;
}

PlanValidation validate_plan(const PlanContext& ctx, const RegraspPlan& plan, double dt, double sample_period) {
  SimOptions opts;
  opts.dt = dt;
  opts.duration = plan.T2();
  opts.sample_period = sample_period;
  PlanValidation v;
  v.trace = simulate(ctx.task, plan_fingers(ctx, plan), plan_anchor_trajectory(ctx, plan),
                     stationary_object(ctx.pose), opts);
  const Vec2 goal = plan.has_phase2 ? plan.spec.G : plan.spec.S;
  for (int i = 0; i < 2; ++i) {
    const Vec2 tip = ctx.task.boundary.query(v.trace.final_state.fingers[i].s).position;
    const Vec2 target = ctx.task.boundary.query(ctx.s_at_height(i, goal[i])).position;
    v.deviation[i] = (tip - target).norm();
  }
  return v;
}

RegraspPlan plan_regrasp(const PlanContext& ctx, const PlanSpec& spec, PlanValidation* validation) {
  if (!(spec.T1 > 0.0) || !(spec.T2 >= spec.T1)) throw DomainError("planner", "need 0 < T1 <= T2");
  ctx.task.validate();
  RegraspPlan plan;
  plan.spec = spec;
  const Vec2 diff = spec.G - spec.S;
  for (int i = 0; i < 2; ++i) plan.dirs[i] = sgn(diff[i]) != 0 ? sgn(diff[i]) : -1;

  const HandSolution hs = hand_from_heights(ctx, spec.S.x(), spec.S.y(), plan.dirs);
  if (!hs.pushing) throw PlanningError("planner", "S does not admit pushing cone-edge forces");
  plan.p_hS = hs.p_h;
  plan.p_h0 = spec.initial_hand ? *spec.initial_hand : Vec2(hs.p_h + spec.initial_hand_offset);

  // Initial forces must lie inside the friction cones.
  for (int i = 0; i < 2; ++i) {
    const ContactEdge c = contact_edge(ctx, i, spec.S[i], plan.dirs[i]);
    const Vec2 f = -ctx.hand.stiffness[i] * (c.tip - ctx.hand.anchor(i, plan.p_h0));
    const ContactMode m = contact_mode<2>(decompose<2>(f, c.normal), ctx.task.mu);
    if (m == ContactMode::OutsideCone || m == ContactMode::Separated)
      throw DomainError("planner", "initial force of finger " + std::to_string(i + 1) + " is outside its friction cone");
  }
  plan.phase1 = phase1_plan(plan.p_h0, plan.p_hS, spec.T1);

  plan.has_phase2 = diff.cwiseAbs().maxCoeff() > 1e-12;
  if (plan.has_phase2) {
    if (!(spec.T2 > spec.T1)) throw DomainError("planner", "T2 must exceed T1 when G differs from S");
    const GridSpec grid = default_grid(ctx, spec.step);
    const FCMap map = fcmap(ctx, grid, plan.dirs);
    if (!map.connected(spec.S, spec.G))
      throw PlanningError("planner", "S and G are not in the same feasible component of the contact map");
    plan.xi = xi_star(ctx, std::min(spec.S.x(), spec.G.x()), std::max(spec.S.x(), spec.G.x()), spec.step,
                      plan.dirs, grid.y2_lo, grid.y2_hi);
    if (plan.xi.empty()) throw PlanningError("planner", "no height of finger 1 admits a feasible grasp");
    plan.phase2 = phase2_plan(spec.S, spec.G, plan.xi, spec.T2 - spec.T1, spec.kappa);
  }

  PlanValidation v = validate_plan(ctx, plan, spec.validate_dt);
  const double worst = std::max(v.deviation[0], v.deviation[1]);
  if (worst > spec.tolerance) {
    std::ostringstream os;
    os << "simulated execution misses the goal: worst fingertip deviation " << worst << " m";
    throw PlanningError("planner", os.str());
  }
  if (validation) *validation = std::move(v);
  return plan;
}

}  // namespace sslide
