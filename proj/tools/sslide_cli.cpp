#include <sslide/io.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace sslide;
namespace fs = std::filesystem;

namespace {

struct Args {
  std::string task, motion, spec, wc, trace, config, out = ".", eps = "auto", sweep = "0:0.01745:3.12";
  double dt = 1e-3, step = 1e-3, sample_period = 0.0;
  int jobs = 1;
  std::uint64_t seed = 1;
  bool synthesize = false;
};

void emit(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  save_text(dir / name, text);
}

int run_simulate(const Args& a) {
  const TaskFile task = load_task(a.task);
  const fs::path mpath(a.motion);
  const Motion m = motion_from_json(load_json(mpath), task, mpath.parent_path());
  SimOptions opts;
  opts.dt = a.dt;
  opts.duration = m.duration;
  opts.sample_period = a.sample_period > 0.0 ? a.sample_period : m.sample_period;
  const Trace tr = simulate(task.task, m.fingers, m.anchors, m.object, opts);
  emit(a.out, "trace.csv", trace_csv(tr));
  Json events = Json::array();
  for (const auto& e : tr.events)
    events.push_back({{"t", e.t}, {"finger", e.finger + 1}, {"from", to_string(e.from)}, {"to", to_string(e.to)}});
  emit(a.out, "events.json", events.dump(2) + "\n");
  return 0;
}

int run_plan(const Args& a) {
  const TaskFile task = load_task(a.task);
  const PlanContext ctx = task.context();
  PlanSpec spec = plan_spec_from_json(load_json(a.spec));
  if (a.dt > 0.0) spec.validate_dt = a.dt;
  PlanValidation v;
  const RegraspPlan plan = plan_regrasp(ctx, spec, &v);
  emit(a.out, "plan.json", to_json(plan).dump(2) + "\n");
  const double sp = a.sample_period > 0.0 ? a.sample_period : 0.01;
  emit(a.out, "hand.csv", plan_csv(ctx, plan, sp));
  emit(a.out, "trace.csv", trace_csv(v.trace));
  std::cout << Json{{"deviation", {v.deviation[0], v.deviation[1]}}, {"T2", plan.T2()}}.dump() << "\n";
  return 0;
}

int run_fcmap(const Args& a) {
  const TaskFile task = load_task(a.task);
  const PlanContext ctx = task.context();
  SlideDirs dirs{-1, -1};
  if (!a.spec.empty()) {
    const PlanSpec s = plan_spec_from_json(load_json(a.spec));
    for (int i = 0; i < 2; ++i) dirs[i] = s.G[i] > s.S[i] ? 1 : -1;
  }
  std::cout << fcmap_csv(fcmap(ctx, default_grid(ctx, a.step), dirs));
  return 0;
}

int run_robust(const Args& a) {
  const TaskFile task = load_task(a.task);
  const Json wj = load_json(a.wc);
  VecX wc(3);
  if (wj.is_array()) {
    if (wj.size() != 3) throw IoError("io", a.wc + ": expected [tau, fx, fy]");
    for (int k = 0; k < 3; ++k) wc[k] = wj[k].get<double>();
  } else {
    // Fingertip contacts: [{"position": [x, y], "force": [fx, fy]}, ...] in the body frame.
    wc.setZero();
    for (const auto& c : wj.at("contacts"))
      wc += contact_wrench(vec2_from(c.at("position"), "position"), vec2_from(c.at("force"), "force"),
                           task.task.characteristic_length);
  }
  const WrenchCone cone = build_external_cone(task.task, task.pose);
  const VecX wg = scaled_gravity(task.task);
  const bool want_max = a.eps == "auto";
  double eps = 0.0;
  if (!want_max) {
    std::size_t used = 0;
    eps = std::stod(a.eps, &used);
    if (used != a.eps.size() || !(eps >= 0.0)) throw DomainError("cli", "--eps must be 'auto' or a nonnegative number");
  }
  const RobustnessReport r = robustness_report(cone.W, wc, wg, eps, want_max);
  std::cout << to_json(r).dump(2) << "\n";
  if (!r.nominal_feasible) return 2;
  return 0;
}

int run_ident(const Args& a) {
  const fs::path cpath(a.config);
  IdentConfig cfg = load_ident_config(cpath);
  cfg.seed = a.seed;
  cfg.problem.jobs = a.jobs;
  if (a.synthesize) {
    cfg.problem.obs = synthesize(cfg);
    Trace tr;
    for (std::size_t k = 0; k < cfg.problem.obs.t.size(); ++k) {
      TraceRow r;
      r.t = cfg.problem.obs.t[k];
      r.hand = cfg.problem.hand_path(r.t);
      r.anchors = cfg.problem.ctx.hand.anchors(r.hand);
      r.tips_body = {cfg.problem.obs.tips_body[k][0], cfg.problem.obs.tips_body[k][1]};
      r.forces = {Vec2::Constant(NAN), Vec2::Constant(NAN)};
      r.modes = {FingerMode::Sticking, FingerMode::Sticking};
      r.margin = NAN;
      tr.rows.push_back(r);
    }
    emit(a.out, "observed.csv", trace_csv(tr));
    if (a.trace.empty()) return 0;
  }
  if (a.trace.empty()) throw DomainError("cli", "ident needs --trace or --synthesize");
  cfg.problem.obs = read_observations_csv(a.trace);
  const IdentResult res = fit(cfg.problem);
  emit(a.out, "ident.json", to_json(res).dump(2) + "\n");
  const Trace fitted = simulate_experiment(cfg.problem, res.params, cfg.problem.obs.t[1] - cfg.problem.obs.t[0],
                                           cfg.problem.obs.t.back());
  emit(a.out, "comparison.csv", comparison_csv(cfg.problem.obs, fitted));
  std::cout << to_json(res).dump(2) << "\n";
  return 0;
}

int run_stiffness2r(const Args& a) {
  std::vector<double> v;
  std::stringstream ss(a.sweep);
  std::string part;
  while (std::getline(ss, part, ':')) v.push_back(std::stod(part));
  if (v.size() != 3 || !(v[1] > 0.0) || v[2] < v[0]) throw DomainError("cli", "--theta2-sweep expects lo:step:hi");
  std::cout << "theta2,k11,k12,k22,eig_lo,eig_hi,closed_lo,closed_hi,pd\n";
  const int n = static_cast<int>(std::floor((v[2] - v[0]) / v[1] + 1e-9));
  for (int k = 0; k <= n; ++k) {
    const double th = v[0] + k * v[1];
    if (std::abs(std::sin(th)) < 1e-12) {
      std::cout << fmt(th) << ",nan,nan,nan,nan,nan,nan,nan,0\n";
      continue;
    }
    const Mat2 K = stiffness_2r(0.0, th, Vec2::Ones(), Vec2::Ones());
    const Vec2 e = Eigen::SelfAdjointEigenSolver<Mat2>(K).eigenvalues();
    const Vec2 c = stiffness_2r_eigenvalues(th);
    const bool pd = e[0] > 1e-12 * e.cwiseAbs().maxCoeff();
    std::cout << fmt(th) << ',' << fmt(K(0, 0)) << ',' << fmt(K(0, 1)) << ',' << fmt(K(1, 1)) << ',' << fmt(e[0]) << ','
              << fmt(e[1]) << ',' << fmt(c[0]) << ',' << fmt(c[1]) << ',' << (pd ? 1 : 0) << "\n";
  }
  return 0;
}

std::string diagnostic_for(const Error& e) {
  const std::string w = e.what();
  if (w.find("balance") != std::string::npos) return "balance_infeasible";
  if (dynamic_cast<const DegeneracyError*>(&e)) return "degeneracy";
  if (dynamic_cast<const PlanningError*>(&e)) return "planning_failed";
  return "domain_error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spring-sliding compliance simulator and regrasp planner"};
  app.require_subcommand(1);
  Args a;
  app.add_option("--jobs", a.jobs, "Worker cap")->check(CLI::PositiveNumber);
  app.add_option("--seed", a.seed, "Seed for randomized steps");

  auto* sim = app.add_subcommand("simulate", "Simulate a motion");
  sim->add_option("--task", a.task)->required()->check(CLI::ExistingFile);
  sim->add_option("--motion", a.motion)->required()->check(CLI::ExistingFile);
  sim->add_option("--dt", a.dt)->check(CLI::PositiveNumber);
  sim->add_option("--sample-period", a.sample_period)->check(CLI::PositiveNumber);
  sim->add_option("--out", a.out);

  auto* plan = app.add_subcommand("plan", "Plan a two-finger regrasp");
  plan->add_option("--task", a.task)->required()->check(CLI::ExistingFile);
  plan->add_option("--spec", a.spec)->required()->check(CLI::ExistingFile);
  plan->add_option("--dt", a.dt, "Validation time step")->check(CLI::PositiveNumber);
  plan->add_option("--sample-period", a.sample_period)->check(CLI::PositiveNumber);
  plan->add_option("--out", a.out);

  auto* map = app.add_subcommand("fcmap", "Feasible contact map as CSV");
  map->add_option("--task", a.task)->required()->check(CLI::ExistingFile);
  map->add_option("--spec", a.spec, "Plan spec giving the sliding directions")->check(CLI::ExistingFile);
  map->add_option("--step", a.step)->check(CLI::PositiveNumber);

  auto* rob = app.add_subcommand("robust", "Robustness of wrench balance");
  rob->add_option("--task", a.task)->required()->check(CLI::ExistingFile);
  rob->add_option("--wc", a.wc, "Fingertip wrench JSON")->required()->check(CLI::ExistingFile);
  rob->add_option("--eps", a.eps, "'auto' or a disturbance bound");

  auto* id = app.add_subcommand("ident", "Fit friction and stiffness to a trace");
  id->add_option("--trace", a.trace)->check(CLI::ExistingFile);
  id->add_option("--config", a.config)->required()->check(CLI::ExistingFile);
  id->add_flag("--synthesize", a.synthesize, "Write observed.csv from the config's truth parameters");
  id->add_option("--out", a.out);

  auto* k2r = app.add_subcommand("stiffness2r", "Two-link finger stiffness sweep");
  k2r->add_option("--theta2-sweep", a.sweep, "lo:step:hi in radians");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sim) return run_simulate(a);
    if (*plan) return run_plan(a);
    if (*map) return run_fcmap(a);
    if (*rob) return run_robust(a);
    if (*id) return run_ident(a);
    if (*k2r) return run_stiffness2r(a);
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "io: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cout << Json{{"error", diagnostic_for(e)}, {"module", e.module()}, {"message", e.what()}}.dump(2) << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "cli: bad numeric argument\n";
    return 1;
  }
  return 1;
}
