#pragma once

#include <sslide/ident.hpp>
#include <sslide/planner.hpp>
#include <sslide/robustness.hpp>
#include <sslide/simulator.hpp>
#include <sslide/sliding.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sslide {

using Json = nlohmann::json;

// Unreadable file or malformed content.
class IoError : public Error {
 public:
  using Error::Error;
};

Json load_json(const std::filesystem::path& path);
Json parse_json(const std::string& text, const std::string& source);
void save_text(const std::filesystem::path& path, const std::string& text);

Vec2 vec2_from(const Json& j, const std::string& what);
Mat2 mat2_from(const Json& j, const std::string& what);
Json to_json(const Vec2& v);
Json to_json(const Mat2& m);

// 17 significant digits.
std::string fmt(double x);

struct FingerSpec {
  Vec2 anchor = Vec2::Zero();
  Vec2 rest_offset = Vec2::Zero();
  StiffnessModel stiffness;
  int face = -1;
  std::optional<double> s0;
  std::optional<double> height;
};

struct TaskFile {
  TaskModel task;
  ObjectPose pose;
  std::vector<FingerSpec> fingers;
  std::optional<HandModel> hand;

  // Two-finger planning context (needs a hand and faces for both fingers).
  PlanContext context() const;
  std::vector<FingerSetup> setups() const;
  AnchorSample anchors() const;
};

TaskFile task_from_json(const Json& j);
TaskFile load_task(const std::filesystem::path& path);

PlanSpec plan_spec_from_json(const Json& j);
Json to_json(const RegraspPlan& plan);
RegraspPlan plan_from_json(const Json& j);

Json to_json(const SlidingCoefficients& c);
Json to_json(const RobustnessReport& r);
Json to_json(const IdentResult& r);

// Hand and anchor samples of a plan every sample_period from 0 to T2.
std::string plan_csv(const PlanContext& ctx, const RegraspPlan& plan, double sample_period);

std::string trace_csv(const Trace& trace);
void write_trace_csv(std::ostream& out, const Trace& trace);
IdentObservations read_observations_csv(const std::filesystem::path& path);
IdentObservations observations_from_csv(const std::string& text, const std::string& source);

std::string fcmap_csv(const FCMap& map);

// Motion description for `simulate`.
struct Motion {
  AnchorTrajectory anchors;
  ObjectMotion object;
  double duration = 1.0;
  double sample_period = 1e-2;
  std::optional<RegraspPlan> plan;
  std::vector<FingerSetup> fingers;
};

Motion motion_from_json(const Json& j, const TaskFile& task, const std::filesystem::path& base_dir);

struct IdentConfig {
  TaskFile task;
  IdentProblem problem;  // observations left empty
  std::optional<IdentParams> truth;
  int samples = 5000;
  double duration = 15.0;
  double noise = 0.0;  // std of additive position noise (m)
  std::uint64_t seed = 1;

  double sample_period() const { return duration / samples; }
};

IdentParams ident_params_from_json(const Json& j);
Json to_json(const IdentParams& p);
IdentConfig ident_config_from_json(const Json& j, const std::filesystem::path& base_dir);
IdentConfig load_ident_config(const std::filesystem::path& path);

// Noise-free or noisy synthetic observations from the config's truth parameters.
IdentObservations synthesize(const IdentConfig& cfg);

// Observed and fitted fingertip positions side by side.
std::string comparison_csv(const IdentObservations& observed, const Trace& fitted);

}  // namespace sslide
