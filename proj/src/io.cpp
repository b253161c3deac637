#include <sslide/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>

namespace sslide {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("io", "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const Json& member(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw IoError("io", where + ": missing key '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw IoError("io", what + ": expected a number");
  return j.get<double>();
}

double number_or(const Json& j, const std::string& key, double fallback) {
  return j.contains(key) ? number(j.at(key), key) : fallback;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path q(p);
  return q.is_absolute() ? q : base / q;
}

StiffnessModel stiffness_from(const Json& j, const std::string& what) {
  if (j.is_object()) {
    const std::string model = j.value("model", "");
    if (model != "2r") throw IoError("io", what + ": unknown stiffness model '" + model + "'");
    const Vec2 tau = vec2_from(member(j, "torques", what), what + ".torques");
    const Vec2 links = vec2_from(member(j, "links", what), what + ".links");
    return StiffnessModel::two_link(tau, links, number_or(j, "elbow", 1.0));
  }
  return StiffnessModel::constant(mat2_from(j, what));
}

Json cubic_json(const Cubic2& c) {
  Json coeffs = Json::array();
  for (const auto& v : c.c) coeffs.push_back(to_json(v));
  return Json{{"coefficients", coeffs}, {"duration", c.duration}};
}

Cubic2 cubic_from(const Json& j) {
  Cubic2 c;
  const Json& co = member(j, "coefficients", "cubic");
  if (!co.is_array() || co.size() != 4) throw IoError("io", "cubic: expected four coefficient vectors");
  for (int k = 0; k < 4; ++k) c.c[k] = vec2_from(co[k], "cubic coefficient");
  c.duration = number(member(j, "duration", "cubic"), "cubic duration");
  return c;
}

Json points_json(const std::vector<Vec2>& ps) {
  Json a = Json::array();
  for (const auto& p : ps) a.push_back(to_json(p));
  return a;
}

std::vector<Vec2> points_from(const Json& j, const std::string& what) {
  if (!j.is_array()) throw IoError("io", what + ": expected an array");
  std::vector<Vec2> out;
  for (const auto& p : j) out.push_back(vec2_from(p, what));
  return out;
}

std::vector<double> numbers_from(const Json& j, const std::string& what) {
  if (!j.is_array()) throw IoError("io", what + ": expected an array");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x, what));
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw IoError("io", source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

Json load_json(const std::filesystem::path& path) { return parse_json(read_file(path), path.string()); }

void save_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("io", "cannot write " + path.string());
  out << text;
}

Vec2 vec2_from(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw IoError("io", what + ": expected [x, y]");
  return Vec2(number(j[0], what), number(j[1], what));
}

Mat2 mat2_from(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw IoError("io", what + ": expected a 2x2 matrix");
  Mat2 m;
  m.row(0) = vec2_from(j[0], what).transpose();
  m.row(1) = vec2_from(j[1], what).transpose();
  return m;
}

Json to_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }
Json to_json(const Mat2& m) { return Json::array({to_json(Vec2(m.row(0).transpose())), to_json(Vec2(m.row(1).transpose()))}); }

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------- task

PlanContext TaskFile::context() const {
  if (!hand) throw DomainError("io", "task has no hand description");
  if (fingers.size() != 2) throw DomainError("io", "planning needs exactly two fingers");
  PlanContext ctx;
  ctx.task = task;
  ctx.hand = *hand;
  ctx.pose = pose;
  for (int i = 0; i < 2; ++i) {
    if (fingers[i].face < 0) throw DomainError("io", "finger " + std::to_string(i + 1) + " has no face");
    ctx.faces[i] = fingers[i].face;
  }
  return ctx;
}

std::vector<FingerSetup> TaskFile::setups() const {
  std::vector<FingerSetup> out;
  for (std::size_t i = 0; i < fingers.size(); ++i) {
    const FingerSpec& f = fingers[i];
    FingerSetup s;
    s.stiffness = f.stiffness;
    s.rest_offset = f.rest_offset;
    if (f.s0) {
      s.s0 = *f.s0;
    } else if (f.height && f.face >= 0) {
      s.s0 = task.boundary.locate_height(f.face, *f.height);
    } else {
      throw DomainError("io", "finger " + std::to_string(i + 1) + " needs 's' or 'face' and 'height'");
    }
    out.push_back(s);
  }
  return out;
}

AnchorSample TaskFile::anchors() const {
  AnchorSample a;
  if (hand) a.hand = hand->position;
  for (const auto& f : fingers) a.anchors.push_back(f.anchor);
  return a;
}

TaskFile task_from_json(const Json& j) {
  TaskFile tf;
  std::vector<BoundaryPiece> pieces;
  const Json& b = member(j, "boundary", "task");
  if (!b.is_array()) throw IoError("io", "task.boundary: expected an array of pieces");
  for (std::size_t k = 0; k < b.size(); ++k) {
    const Json& p = b[k];
    const std::string where = "task.boundary[" + std::to_string(k) + "]";
    const std::string kind = member(p, "kind", where).get<std::string>();
    BoundaryPiece piece;
    if (kind == "segment") {
      piece = BoundaryPiece::segment(vec2_from(member(p, "start", where), where), vec2_from(member(p, "end", where), where));
    } else if (kind == "arc") {
      piece = BoundaryPiece::arc(vec2_from(member(p, "center", where), where), number(member(p, "radius", where), where),
                                 number(member(p, "start_angle", where), where),
                                 number(member(p, "end_angle", where), where));
    } else {
      throw IoError("io", where + ": unknown piece kind '" + kind + "'");
    }
    piece.interior_left = p.value("interior_left", true);
    pieces.push_back(piece);
  }
  tf.task.boundary = Boundary(std::move(pieces));
  if (j.contains("env_contacts")) {
    for (const auto& c : j.at("env_contacts")) {
      EnvContact e;
      e.position = vec2_from(member(c, "position", "env_contact"), "env_contact.position");
      e.normal = vec2_from(member(c, "normal", "env_contact"), "env_contact.normal");
      const std::string mode = c.value("mode", "sticking");
      if (mode == "sliding") {
        e.sliding = true;
        e.sliding_direction = vec2_from(member(c, "direction", "env_contact"), "env_contact.direction");
      } else if (mode != "sticking") {
        throw IoError("io", "env_contact: unknown mode '" + mode + "'");
      }
      tf.task.env_contacts.push_back(e);
    }
  }
  tf.task.mu = number(member(j, "mu", "task"), "task.mu");
  tf.task.mu_e = number_or(j, "mu_e", 0.0);
  if (j.contains("gravity_wrench")) {
    const auto g = numbers_from(j.at("gravity_wrench"), "task.gravity_wrench");
    if (g.size() != 3) throw IoError("io", "task.gravity_wrench: expected [tau, fx, fy]");
    tf.task.gravity_wrench = Vec3(g[0], g[1], g[2]);
  }
  tf.task.characteristic_length = number_or(j, "characteristic_length", 1.0);
  tf.task.cone_edges = j.value("cone_edges", 8);
  if (j.contains("object_pose")) {
    const Json& p = j.at("object_pose");
    tf.pose.position = vec2_from(member(p, "position", "object_pose"), "object_pose.position");
    tf.pose.angle = number_or(p, "angle", 0.0);
  }
  if (j.contains("fingers")) {
    for (std::size_t k = 0; k < j.at("fingers").size(); ++k) {
      const Json& f = j.at("fingers")[k];
      const std::string where = "task.fingers[" + std::to_string(k) + "]";
      FingerSpec fs;
      if (f.contains("anchor")) fs.anchor = vec2_from(f.at("anchor"), where + ".anchor");
      if (f.contains("rest_offset")) fs.rest_offset = vec2_from(f.at("rest_offset"), where + ".rest_offset");
      fs.stiffness = stiffness_from(member(f, "stiffness", where), where + ".stiffness");
      fs.face = f.value("face", -1);
      if (f.contains("s")) fs.s0 = number(f.at("s"), where + ".s");
      if (f.contains("height")) fs.height = number(f.at("height"), where + ".height");
      tf.fingers.push_back(fs);
    }
  }
  if (j.contains("hand")) {
    const Json& h = j.at("hand");
    HandModel hand;
    if (h.contains("position")) hand.position = vec2_from(h.at("position"), "hand.position");
    hand.rotation = number_or(h, "rotation", 0.0);
    hand.anchor_offsets = points_from(member(h, "anchors", "hand"), "hand.anchors");
    if (hand.anchor_offsets.size() != tf.fingers.size())
      throw IoError("io", "hand.anchors: need one offset per finger");
    for (std::size_t i = 0; i < tf.fingers.size(); ++i) {
      if (tf.fingers[i].stiffness.kind() != StiffnessModel::Kind::Constant)
        throw IoError("io", "hand fingers need constant stiffness matrices");
      hand.stiffness.push_back(tf.fingers[i].stiffness.matrix());
      tf.fingers[i].anchor = hand.anchor(static_cast<int>(i), hand.position);
    }
    tf.hand = hand;
  }
  tf.task.validate();
  return tf;
}

TaskFile load_task(const std::filesystem::path& path) { return task_from_json(load_json(path)); }

// ---------------------------------------------------------------- plans

PlanSpec plan_spec_from_json(const Json& j) {
  PlanSpec s;
  s.S = vec2_from(member(j, "S", "plan spec"), "S");
  s.G = vec2_from(member(j, "G", "plan spec"), "G");
  s.T1 = number_or(j, "T1", s.T1);
  s.T2 = number_or(j, "T2", s.T2);
  s.kappa = number_or(j, "kappa", s.kappa);
  s.step = number_or(j, "step", s.step);
  if (j.contains("initial_hand")) s.initial_hand = vec2_from(j.at("initial_hand"), "initial_hand");
  if (j.contains("initial_hand_offset")) s.initial_hand_offset = vec2_from(j.at("initial_hand_offset"), "initial_hand_offset");
  s.validate_dt = number_or(j, "validate_dt", s.validate_dt);
  s.tolerance = number_or(j, "tolerance", s.tolerance);
  if (!(s.T1 > 0.0) || !(s.T2 >= s.T1) || !(s.step > 0.0) || !(s.validate_dt > 0.0) || !(s.tolerance > 0.0))
    throw DomainError("io", "plan spec needs positive durations, step and tolerances with T1 <= T2");
  return s;
}

Json to_json(const RegraspPlan& plan) {
  const PlanSpec& s = plan.spec;
  Json spec{{"S", to_json(s.S)},
            {"G", to_json(s.G)},
            {"T1", s.T1},
            {"T2", s.T2},
            {"kappa", s.kappa},
            {"step", s.step},
            {"initial_hand_offset", to_json(s.initial_hand_offset)},
            {"validate_dt", s.validate_dt},
            {"tolerance", s.tolerance}};
  if (s.initial_hand) spec["initial_hand"] = to_json(*s.initial_hand);
  Json j{{"spec", spec},
         {"dirs", {plan.dirs[0], plan.dirs[1]}},
         {"p_h0", to_json(plan.p_h0)},
         {"p_hS", to_json(plan.p_hS)},
         {"phase1", cubic_json(plan.phase1)},
         {"has_phase2", plan.has_phase2}};
  if (plan.has_phase2) {
    const Phase2Plan& p = plan.phase2;
    j["phase2"] = Json{{"S", to_json(p.S)},       {"Sp", to_json(p.Sp)},     {"Gp", to_json(p.Gp)},
                       {"G", to_json(p.G)},       {"v_s", to_json(p.v_s)},   {"v_g", to_json(p.v_g)},
                       {"v2", p.v2},              {"L2", p.L2},              {"kappa", p.kappa},
                       {"V_max", p.V_max},        {"objective", p.objective}, {"dT21", p.dT21},
                       {"dT22", p.dT22},          {"dT23", p.dT23},          {"path", points_json(p.path)},
                       {"path_s", p.path_s},      {"piece1", cubic_json(p.piece1)},
                       {"piece3", cubic_json(p.piece3)}};
  }
  Json xi = Json::array();
  for (const auto& x : plan.xi) xi.push_back({x.y1, x.y2, x.margin});
  j["xi"] = xi;
  return j;
}

RegraspPlan plan_from_json(const Json& j) {
  RegraspPlan plan;
  plan.spec = plan_spec_from_json(member(j, "spec", "plan"));
  const auto dirs = numbers_from(member(j, "dirs", "plan"), "plan.dirs");
  if (dirs.size() != 2) throw IoError("io", "plan.dirs: expected two entries");
  plan.dirs = {static_cast<int>(dirs[0]), static_cast<int>(dirs[1])};
  plan.p_h0 = vec2_from(member(j, "p_h0", "plan"), "plan.p_h0");
  plan.p_hS = vec2_from(member(j, "p_hS", "plan"), "plan.p_hS");
  plan.phase1 = cubic_from(member(j, "phase1", "plan"));
  plan.has_phase2 = member(j, "has_phase2", "plan").get<bool>();
  if (plan.has_phase2) {
    const Json& q = member(j, "phase2", "plan");
    Phase2Plan& p = plan.phase2;
    p.S = vec2_from(member(q, "S", "phase2"), "phase2.S");
    p.Sp = vec2_from(member(q, "Sp", "phase2"), "phase2.Sp");
    p.Gp = vec2_from(member(q, "Gp", "phase2"), "phase2.Gp");
    p.G = vec2_from(member(q, "G", "phase2"), "phase2.G");
    p.v_s = vec2_from(member(q, "v_s", "phase2"), "phase2.v_s");
    p.v_g = vec2_from(member(q, "v_g", "phase2"), "phase2.v_g");
    p.v2 = number(member(q, "v2", "phase2"), "phase2.v2");
    p.L2 = number(member(q, "L2", "phase2"), "phase2.L2");
    p.kappa = number(member(q, "kappa", "phase2"), "phase2.kappa");
    p.V_max = number(member(q, "V_max", "phase2"), "phase2.V_max");
    p.objective = number(member(q, "objective", "phase2"), "phase2.objective");
    p.dT21 = number(member(q, "dT21", "phase2"), "phase2.dT21");
    p.dT22 = number(member(q, "dT22", "phase2"), "phase2.dT22");
    p.dT23 = number(member(q, "dT23", "phase2"), "phase2.dT23");
    p.path = points_from(member(q, "path", "phase2"), "phase2.path");
    p.path_s = numbers_from(member(q, "path_s", "phase2"), "phase2.path_s");
    if (p.path.size() != p.path_s.size() || p.path.size() < 2)
      throw IoError("io", "phase2.path: need at least two points with matching arclengths");
    p.piece1 = cubic_from(member(q, "piece1", "phase2"));
    p.piece3 = cubic_from(member(q, "piece3", "phase2"));
  }
  if (j.contains("xi")) {
    for (const auto& x : j.at("xi")) {
      const auto v = numbers_from(x, "plan.xi");
      if (v.size() != 3) throw IoError("io", "plan.xi: expected [y1, y2, margin]");
      plan.xi.push_back({v[0], v[1], v[2]});
    }
  }
  return plan;
}

// ---------------------------------------------------------------- reports

Json to_json(const SlidingCoefficients& c) {
  return Json{{"f_c", to_json(c.cf.f_c)},     {"f_N", to_json(c.cf.f_N)},
              {"f_t", to_json(c.cf.f_t)},     {"normal", to_json(c.cf.normal)},
              {"mu", c.mu},                   {"K", to_json(c.K)},
              {"c_f", to_json(c.c_f)},        {"g_n", to_json(c.g_n)},
              {"c_n", to_json(c.c_n)},        {"g_c", to_json(c.g_c)},
              {"c_c", to_json(c.c_c)},        {"h", to_json(c.h)},
              {"g_N", to_json(c.g_N)},        {"c_N", to_json(c.c_N)},
              {"g_t", to_json(c.g_t)},        {"c_t", to_json(c.c_t)},
              {"a", to_json(c.a)},            {"anchor_velocity", to_json(c.anchor_velocity)},
              {"lambda_den", c.lambda_den},   {"g_lambda", to_json(c.g_lambda)},
              {"c_lambda", c.c_lambda},       {"degeneracy", to_string(check_degeneracy(c))}};
}

Json to_json(const RobustnessReport& r) {
  Json j{{"epsilon", r.epsilon}, {"nominal_feasible", r.nominal_feasible}, {"sufficient", r.sufficient},
         {"exact", r.exact},     {"margin", r.margin}};
  if (r.has_max_epsilon) j["max_epsilon"] = std::isinf(r.max_epsilon) ? Json("inf") : Json(r.max_epsilon);
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  return j;
}

Json to_json(const IdentParams& p) { return Json{{"mu", p.mu}, {"K1", to_json(p.K[0])}, {"K2", to_json(p.K[1])}}; }

IdentParams ident_params_from_json(const Json& j) {
  IdentParams p;
  p.mu = number(member(j, "mu", "ident params"), "mu");
  p.K[0] = mat2_from(member(j, "K1", "ident params"), "K1");
  p.K[1] = mat2_from(member(j, "K2", "ident params"), "K2");
  return p;
}

Json to_json(const IdentResult& r) {
  return Json{{"params", to_json(r.params)},    {"residual", r.residual},         {"initial_residual", r.initial_residual},
              {"iterations", r.iterations},     {"improvements", r.improvements}, {"evaluations", r.evaluations},
              {"converged", r.converged}};
}

// ---------------------------------------------------------------- CSV

std::string plan_csv(const PlanContext& ctx, const RegraspPlan& plan, double sample_period) {
  std::ostringstream os;
  os << "t,phx,phy,pa1x,pa1y,pa2x,pa2y,y1,y2\n";
  const int n = static_cast<int>(std::ceil(plan.T2() / sample_period - 1e-9));
  for (int k = 0; k <= n; ++k) {
    const double t = std::min(k * sample_period, plan.T2());
    const Vec2 ph = plan_hand(ctx, plan, t);
    const Vec2 y = plan.xi_at(t);
    os << fmt(t) << ',' << fmt(ph.x()) << ',' << fmt(ph.y());
    for (int i = 0; i < 2; ++i) {
      const Vec2 a = ctx.hand.anchor(i, ph);
      os << ',' << fmt(a.x()) << ',' << fmt(a.y());
    }
    os << ',' << fmt(y.x()) << ',' << fmt(y.y()) << '\n';
  }
  return os.str();
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  const std::size_t n = trace.rows.empty() ? trace.final_state.fingers.size() : trace.rows.front().anchors.size();
  os << "t,phx,phy";
  for (std::size_t i = 1; i <= n; ++i) os << ",pa" << i << "x,pa" << i << "y";
  for (std::size_t i = 1; i <= n; ++i) os << ",pf" << i << "B_x,pf" << i << "B_y";
  for (std::size_t i = 1; i <= n; ++i) os << ",fc" << i << "x,fc" << i << "y";
  for (std::size_t i = 1; i <= n; ++i) os << ",mode" << i;
  os << ",margin\n";
  for (const auto& r : trace.rows) {
    os << fmt(r.t) << ',' << fmt(r.hand.x()) << ',' << fmt(r.hand.y());
    for (const auto& v : r.anchors) os << ',' << fmt(v.x()) << ',' << fmt(v.y());
    for (const auto& v : r.tips_body) os << ',' << fmt(v.x()) << ',' << fmt(v.y());
    for (const auto& v : r.forces) os << ',' << fmt(v.x()) << ',' << fmt(v.y());
    for (const auto m : r.modes) os << ',' << to_string(m);
    os << ',' << fmt(r.margin) << '\n';
  }
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

IdentObservations observations_from_csv(const std::string& text, const std::string& source) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw IoError("io", source + ": empty trace");
  const auto header = split(line, ',');
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
  const char* needed[] = {"t", "pf1B_x", "pf1B_y", "pf2B_x", "pf2B_y"};
  for (const char* name : needed)
    if (!col.count(name)) throw IoError("io", source + ":1: missing column '" + std::string(name) + "'");
  IdentObservations obs;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    auto get = [&](const char* name) {
      const std::size_t k = col.at(name);
      double v = 0.0;
      if (k >= f.size()) throw IoError("io", source + ":" + std::to_string(lineno) + ": too few fields");
      const auto r = std::from_chars(f[k].data(), f[k].data() + f[k].size(), v);
      if (r.ec != std::errc() || r.ptr != f[k].data() + f[k].size())
        throw IoError("io", source + ":" + std::to_string(lineno) + ": bad number in column '" + name + "'");
      return v;
    };
    obs.t.push_back(get("t"));
    obs.tips_body.push_back({Vec2(get("pf1B_x"), get("pf1B_y")), Vec2(get("pf2B_x"), get("pf2B_y"))});
  }
  return obs;
}

IdentObservations read_observations_csv(const std::filesystem::path& path) {
  return observations_from_csv(read_file(path), path.string());
}

std::string fcmap_csv(const FCMap& map) {
  std::ostringstream os;
  os << "y1,y2,feasible,margin,component\n";
  for (std::size_t i1 = 0; i1 < map.y1.size(); ++i1) {
    for (std::size_t i2 = 0; i2 < map.y2.size(); ++i2) {
      const FCPoint& c = map.at(i1, i2);
      os << fmt(map.y1[i1]) << ',' << fmt(map.y2[i2]) << ',' << (c.feasible ? 1 : 0) << ',' << fmt(c.margin) << ','
         << map.labels[i1 * map.y2.size() + i2] << '\n';
    }
  }
  return os.str();
}

std::string comparison_csv(const IdentObservations& observed, const Trace& fitted) {
  std::ostringstream os;
  os << "t,obs_pf1B_x,obs_pf1B_y,obs_pf2B_x,obs_pf2B_y,fit_pf1B_x,fit_pf1B_y,fit_pf2B_x,fit_pf2B_y\n";
  const std::size_t n = std::min(observed.t.size(), fitted.rows.size());
  for (std::size_t k = 0; k < n; ++k) {
    os << fmt(observed.t[k]);
    for (const auto& v : observed.tips_body[k]) os << ',' << fmt(v.x()) << ',' << fmt(v.y());
    for (const auto& v : fitted.rows[k].tips_body) os << ',' << fmt(v.x()) << ',' << fmt(v.y());
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- motion

Motion motion_from_json(const Json& j, const TaskFile& task, const std::filesystem::path& base_dir) {
  Motion m;
  m.sample_period = number_or(j, "sample_period", m.sample_period);
  if (!(m.sample_period > 0.0)) throw DomainError("io", "sample_period must be positive");
  const ObjectPose pose = task.pose;
  m.object = stationary_object(pose);

  if (j.contains("plan")) {
    const Json& pj = j.at("plan");
    m.plan = plan_from_json(pj.is_string() ? load_json(resolve(base_dir, pj.get<std::string>())) : pj);
    const PlanContext ctx = task.context();
    m.fingers = plan_fingers(ctx, *m.plan);
    m.duration = number_or(j, "duration", m.plan->T2());
    auto shared_ctx = std::make_shared<PlanContext>(ctx);
    auto shared_plan = std::make_shared<RegraspPlan>(*m.plan);
    m.anchors = [shared_ctx, shared_plan](double t) {
      AnchorSample a;
      a.hand = plan_hand(*shared_ctx, *shared_plan, t);
      a.anchors = shared_ctx->hand.anchors(a.hand);
      return a;
    };
    return m;
  }

  m.duration = number(member(j, "duration", "motion"), "motion.duration");
  if (!(m.duration > 0.0)) throw DomainError("io", "motion duration must be positive");
  m.fingers = task.setups();
  if (j.contains("hand_velocity")) {
    if (!task.hand) throw DomainError("io", "hand_velocity needs a hand in the task");
    const Vec2 v = vec2_from(j.at("hand_velocity"), "motion.hand_velocity");
    const HandModel hand = *task.hand;
    m.anchors = [hand, v](double t) {
      AnchorSample a;
      a.hand = hand.position + v * t;
      a.anchors = hand.anchors(a.hand);
      return a;
    };
  } else {
    const auto vs = points_from(member(j, "anchor_velocities", "motion"), "motion.anchor_velocities");
    if (vs.size() != task.fingers.size()) throw IoError("io", "motion.anchor_velocities: need one per finger");
    const AnchorSample a0 = task.anchors();
    m.anchors = [a0, vs](double t) {
      AnchorSample a = a0;
      for (std::size_t i = 0; i < vs.size(); ++i) a.anchors[i] += vs[i] * t;
      return a;
    };
  }
  if (j.contains("object_velocity") || j.contains("object_angular_velocity")) {
    const Vec2 v = j.contains("object_velocity") ? vec2_from(j.at("object_velocity"), "motion.object_velocity")
                                                 : Vec2::Zero();
    const double w = number_or(j, "object_angular_velocity", 0.0);
    m.object = [pose, v, w](double t) {
      ObjectPose p = pose;
      p.position += v * t;
      p.angle += w * t;
      p.linear_velocity = v;
      p.angular_velocity = w;
      return p;
    };
  }
  return m;
}

// ---------------------------------------------------------------- identification

IdentConfig ident_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  IdentConfig cfg;
  const Json& tj = member(j, "task", "ident config");
  cfg.task = tj.is_string() ? load_task(resolve(base_dir, tj.get<std::string>())) : task_from_json(tj);
  IdentProblem& p = cfg.problem;
  p.ctx = cfg.task.context();
  const Vec2 h0 = vec2_from(member(j, "initial_heights", "ident config"), "initial_heights");
  p.initial_heights = {h0.x(), h0.y()};

  const Json& drag = member(j, "drag", "ident config");
  const Vec2 dir = vec2_from(member(drag, "direction", "drag"), "drag.direction").normalized();
  const double dist = number(member(drag, "distance", "drag"), "drag.distance");
  cfg.duration = number(member(drag, "duration", "drag"), "drag.duration");
  if (!(cfg.duration > 0.0) || !(dist >= 0.0)) throw DomainError("io", "drag needs positive duration and distance");

  Vec2 hand0;
  if (j.contains("initial_hand")) {
    hand0 = vec2_from(j.at("initial_hand"), "initial_hand");
  } else {
    const int s = dir.y() > 0.0 ? 1 : -1;
    const HandSolution hs = hand_from_heights(p.ctx, h0.x(), h0.y(), {s, s});
    hand0 = hs.p_h;
    if (j.contains("initial_hand_offset")) hand0 += vec2_from(j.at("initial_hand_offset"), "initial_hand_offset");
  }
  const Vec2 vel = dir * (dist / cfg.duration);
  p.hand_path = [hand0, vel](double t) { return Vec2(hand0 + vel * t); };

  cfg.samples = j.value("samples", cfg.samples);
  if (cfg.samples < 2) throw DomainError("io", "ident needs at least two samples");
  p.dt = number_or(j, "dt", p.dt);
  p.guess = ident_params_from_json(member(j, "guess", "ident config"));
  if (j.contains("truth")) cfg.truth = ident_params_from_json(j.at("truth"));
  if (j.contains("bounds")) {
    const Json& b = j.at("bounds");
    if (b.contains("mu")) {
      const Vec2 v = vec2_from(b.at("mu"), "bounds.mu");
      p.mu_bounds = {v.x(), v.y()};
    }
    if (b.contains("k")) {
      const Vec2 v = vec2_from(b.at("k"), "bounds.k");
      p.k_bounds = {v.x(), v.y()};
    }
  }
  p.off_diagonal = j.value("off_diagonal", false);
  p.max_evaluations = j.value("max_evaluations", p.max_evaluations);
  p.xtol = number_or(j, "xtol", p.xtol);
  cfg.noise = number_or(j, "noise", 0.0);
  cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
  return cfg;
}

IdentConfig load_ident_config(const std::filesystem::path& path) {
  return ident_config_from_json(load_json(path), path.parent_path());
}

IdentObservations synthesize(const IdentConfig& cfg) {
  if (!cfg.truth) throw DomainError("io", "synthetic data needs 'truth' parameters");
  IdentObservations obs =
      observations_from(simulate_experiment(cfg.problem, *cfg.truth, cfg.sample_period(), cfg.duration));
  if (cfg.noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> n(0.0, cfg.noise);
    for (auto& row : obs.tips_body)
      for (auto& p : row) p += Vec2(n(rng), n(rng));
  }
  return obs;
}

}  // namespace sslide
