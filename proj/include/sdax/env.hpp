#pragma once
// Deterministic 2-D side-view obstacle courses. A point-mass robot with a
// controllable posture height runs a course of gaps, steps, bars, or a wall;
// actuation is four planar controls (horizontal force, vertical impulse,
// posture rate, torque) integrated with semi-implicit Euler.

#include <optional>
#include <string>
#include <vector>

#include "sdax/net.hpp"
#include "sdax/rng.hpp"

namespace sdax {

enum class TaskKind { leap, climb, crawl, walljump, guideline_demo };
enum class ObstacleKind { gap, step, bar, wall };

TaskKind task_from_string(const std::string& s);
std::string to_string(TaskKind t);

struct Obstacle {
  ObstacleKind kind;
  double start_x;  // m
  double size;     // gap width / step height / bar clearance / wall height
  double length;   // extent along x
};

struct RobotState {
  double x = 0.0;
  double height_z = 0.0;
  double h_b = 0.3;  // posture (crouch) height
  double vx = 0.0;
  double vz = 0.0;
  double body_angle = 0.0;
  double body_ang_vel = 0.0;
  bool grounded = true;
};

// Appendix-style task reward coefficients.
struct TaskRewardWeights {
  double w_ang = 0.05;
  double w_lin = -1.0;
  double w_alive = 2.0;
  double w_effort = -1e-6;
  double w_pos_limit = -0.1;
  double w_effort_limit = -0.2;
};

struct Guideline {
  std::vector<std::pair<double, double>> points;  // (x, z)
  double reach_threshold = 0.3;
  int index = 0;
};

// r = exp(-||x - g_i||); advances the waypoint index when within threshold.
double guideline_reward(double x, double z, Guideline& g);

struct NoiseConfig {
  double position = 0.0;
  double rotation = 0.0;
  double lin_vel = 0.0;
  double ang_vel = 0.0;
  double obstacle_dist = 0.0;
  bool any() const {
    return position > 0 || rotation > 0 || lin_vel > 0 || ang_vel > 0 ||
           obstacle_dist > 0;
  }
};

void inject_observation_noise(Vec& obs, const NoiseConfig& cfg, Rng& rng);

struct EnvConfig {
  TaskKind task = TaskKind::crawl;
  int obstacle_count = 3;
  double obstacle_size = -1.0;  // <0: task default (gap .48 / step .25 / bar .29 / wall .6)
  double first_obstacle_x = 2.0;
  double obstacle_spacing = 2.0;
  double bar_length = 0.5;
  double vx_target = 1.0;
  double dt = 0.02;
  int timeout_steps = 500;
  double gravity = 9.81;
  double h_min = 0.1, h_max = 0.4, h_stand = 0.3;
  // actuation scales
  double force_scale = 8.0;
  double impulse_scale = 4.0;
  double posture_rate = 1.0;
  double torque_scale = 5.0;
  double drag = 2.0;
  double ang_damp = 2.0;
  // wall-kick window (walljump analogue)
  double kick_angle = 0.8;
  double kick_window = 0.4;
  double kick_impulse = 3.0;
  double spawn_jitter = 0.0;
  bool div_include_x = false;  // Div-only: append base x to features
  TaskRewardWeights reward;
  NoiseConfig noise;
  std::optional<Guideline> guideline;  // defaulted for walljump/guideline_demo
};

enum class Termination { none, timeout, fall, bar_crash, wall_crash, blocked_timeout, fault };

struct StepInfo {
  int obstacles_passed = 0;
  Termination cause = Termination::none;
};

struct StepResult {
  double r_task = 0.0;
  bool done = false;
  StepInfo info;
};

class ObstacleCourse {
 public:
  explicit ObstacleCourse(const EnvConfig& cfg);

  static constexpr int kObsDim = 15;  // without the skill block
  static constexpr double kDistSentinel = 10.0;

  // New episode; the skill is fixed for the whole episode (Algorithm-style
  // per-episode sampling happens in the caller).
  Vec reset(Rng& rng, const Vec& skill);

  StepResult step(const Vec& action);

  // Observation incl. trailing skill block; noise applied when configured.
  Vec observe(Rng& rng) const;
  Vec observe_clean() const;

  Vec diversity_features() const;
  int diversity_dim() const;

  const RobotState& state() const { return state_; }
  RobotState& mutable_state() { return state_; }
  const Vec& skill() const { return skill_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  int obstacles_passed() const { return passed_; }
  int steps() const { return t_; }
  bool done() const { return done_; }
  const EnvConfig& config() const { return cfg_; }
  int obs_dim_with_skill() const;

  double ground_level(double x) const;  // support height; NaN over a gap

 private:
  double next_obstacle_distance(int* which) const;
  double task_reward(const Vec& raw_action, const Vec& clamped, bool terminal,
                     double pre_clamp_hb);

  EnvConfig cfg_;
  std::vector<Obstacle> obstacles_;
  RobotState state_;
  Vec skill_;
  Guideline guideline_;
  int passed_ = 0;
  int t_ = 0;
  bool done_ = false;
};

}  // namespace sdax
