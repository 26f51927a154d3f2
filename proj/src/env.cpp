#include "sdax/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdax {

TaskKind task_from_string(const std::string& s) {
  if (s == "leap") return TaskKind::leap;
  if (s == "climb") return TaskKind::climb;
  if (s == "crawl") return TaskKind::crawl;
  if (s == "walljump") return TaskKind::walljump;
  if (s == "guideline-demo") return TaskKind::guideline_demo;
  throw std::runtime_error("unknown task: " + s);
}

std::string to_string(TaskKind t) {
  switch (t) {
    case TaskKind::leap: return "leap";
    case TaskKind::climb: return "climb";
    case TaskKind::crawl: return "crawl";
    case TaskKind::walljump: return "walljump";
    case TaskKind::guideline_demo: return "guideline-demo";
  }
  return "?";
}

double guideline_reward(double x, double z, Guideline& g) {
  if (g.points.empty()) throw std::runtime_error("empty guideline");
  const int last = static_cast<int>(g.points.size()) - 1;
  const auto [gx, gz] = g.points[g.index];
  const double dist = std::hypot(x - gx, z - gz);
  const double r = std::exp(-dist);
  if (dist < g.reach_threshold && g.index < last) g.index += 1;
  return r;
}

void inject_observation_noise(Vec& obs, const NoiseConfig& cfg, Rng& rng) {
  auto u = [&](double a) { return a > 0.0 ? rng.uniform(-a, a) : 0.0; };
  for (int i : {0, 1, 2}) obs[i] += u(cfg.position);
  obs[3] += u(cfg.rotation);
  for (int i : {4, 5}) obs[i] += u(cfg.lin_vel);
  obs[6] += u(cfg.ang_vel);
  obs[8] += u(cfg.obstacle_dist);
}

namespace {

ObstacleKind obstacle_kind_for(TaskKind t) {
  switch (t) {
    case TaskKind::leap: return ObstacleKind::gap;
    case TaskKind::climb: return ObstacleKind::step;
    case TaskKind::crawl: return ObstacleKind::bar;
    case TaskKind::walljump: return ObstacleKind::wall;
    case TaskKind::guideline_demo: return ObstacleKind::wall;
  }
  return ObstacleKind::bar;
}

double default_size(ObstacleKind k) {
  switch (k) {
    case ObstacleKind::gap: return 0.48;
    case ObstacleKind::step: return 0.25;
    case ObstacleKind::bar: return 0.29;
    case ObstacleKind::wall: return 0.6;
  }
  return 0.0;
}

Guideline default_guideline(const std::vector<Obstacle>& obs) {
  // Run toward the wall, gain height at it, come back down past it.
  Guideline g;
  const double wx = obs.empty() ? 3.0 : obs.front().start_x;
  g.points = {{wx - 1.5, 0.0}, {wx - 0.5, 0.0}, {wx - 0.1, 0.6},
              {wx + 0.5, 0.3}, {wx + 1.5, 0.0}};
  g.reach_threshold = 0.3;
  return g;
}

}  // namespace

ObstacleCourse::ObstacleCourse(const EnvConfig& cfg) : cfg_(cfg) {
  const ObstacleKind kind = obstacle_kind_for(cfg_.task);
  const double size =
      cfg_.obstacle_size > 0.0 ? cfg_.obstacle_size : default_size(kind);
  const int count = cfg_.task == TaskKind::guideline_demo ? 0 : cfg_.obstacle_count;
  if (count < 0) throw std::runtime_error("negative obstacle count");
  for (int i = 0; i < count; ++i) {
    double len = 0.1;
    switch (kind) {
      case ObstacleKind::gap: len = size; break;
      case ObstacleKind::bar: len = cfg_.bar_length; break;
      case ObstacleKind::step: len = 0.3; break;
      case ObstacleKind::wall: len = 0.05; break;
    }
    obstacles_.push_back(
        {kind, cfg_.first_obstacle_x + i * cfg_.obstacle_spacing, size, len});
  }
  for (std::size_t i = 1; i < obstacles_.size(); ++i) {
    if (obstacles_[i].start_x <
        obstacles_[i - 1].start_x + obstacles_[i - 1].length)
      throw std::runtime_error("obstacles overlap or are unordered");
  }
  if (cfg_.task == TaskKind::walljump || cfg_.task == TaskKind::guideline_demo)
    guideline_ = cfg_.guideline ? *cfg_.guideline : default_guideline(obstacles_);
}

double ObstacleCourse::ground_level(double x) const {
  double base = 0.0;
  for (const auto& o : obstacles_) {
    if (o.kind == ObstacleKind::step && x >= o.start_x) base += o.size;
    if (o.kind == ObstacleKind::gap && x >= o.start_x && x < o.start_x + o.length)
      return std::numeric_limits<double>::quiet_NaN();
  }
  return base;
}

Vec ObstacleCourse::reset(Rng& rng, const Vec& skill) {
  state_ = RobotState{};
  state_.h_b = cfg_.h_stand;
  state_.x = cfg_.spawn_jitter > 0.0 ? rng.uniform(0.0, cfg_.spawn_jitter) : 0.0;
  state_.height_z = 0.0;
  state_.grounded = true;
  skill_ = skill;
  passed_ = 0;
  t_ = 0;
  done_ = false;
  if (cfg_.task == TaskKind::walljump || cfg_.task == TaskKind::guideline_demo) {
    guideline_.index = 0;
  }
  return observe(rng);
}

double ObstacleCourse::next_obstacle_distance(int* which) const {
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    if (state_.x <= obstacles_[i].start_x + obstacles_[i].length) {
      if (which) *which = static_cast<int>(i);
      return std::max(obstacles_[i].start_x - state_.x, 0.0);
    }
  }
  if (which) *which = -1;
  return kDistSentinel;
}

Vec ObstacleCourse::observe_clean() const {
  Vec o(kObsDim, 0.0);
  o[0] = state_.x;
  o[1] = state_.height_z;
  o[2] = state_.h_b;
  o[3] = state_.body_angle;
  o[4] = state_.vx;
  o[5] = state_.vz;
  o[6] = state_.body_ang_vel;
  o[7] = state_.grounded ? 1.0 : 0.0;
  int which = -1;
  o[8] = next_obstacle_distance(&which);
  if (which >= 0) {
    const auto& ob = obstacles_[which];
    o[9] = ob.size;
    o[10] = ob.length;
    o[11 + static_cast<int>(ob.kind)] = 1.0;
  }
  o.insert(o.end(), skill_.begin(), skill_.end());
  return o;
}

Vec ObstacleCourse::observe(Rng& rng) const {
  Vec o = observe_clean();
  if (cfg_.noise.any()) inject_observation_noise(o, cfg_.noise, rng);
  return o;
}

int ObstacleCourse::obs_dim_with_skill() const {
  return kObsDim + static_cast<int>(skill_.size());
}

Vec ObstacleCourse::diversity_features() const {
  Vec f;
  switch (cfg_.task) {
    case TaskKind::climb:
    case TaskKind::crawl:
      f.push_back(state_.height_z + state_.h_b);
      break;
    case TaskKind::leap:
      f.push_back(state_.vx);
      break;
    case TaskKind::walljump:
    case TaskKind::guideline_demo:
      f.push_back(state_.body_angle);
      break;
  }
  if (cfg_.div_include_x) f.push_back(state_.x);
  return f;
}

int ObstacleCourse::diversity_dim() const {
  return 1 + (cfg_.div_include_x ? 1 : 0);
}

double ObstacleCourse::task_reward(const Vec& raw, const Vec& a, bool terminal,
                                   double pre_clamp_hb) {
  const auto& w = cfg_.reward;
  double r = w.w_ang * std::exp(-std::abs(state_.body_ang_vel));
  r += w.w_lin * std::abs(state_.vx - cfg_.vx_target);
  if (!terminal) r += w.w_alive;
  // generalized force x generalized velocity, squared, summed over controls
  double effort = 0.0;
  effort += std::pow(a[0] * cfg_.force_scale * state_.vx, 2);
  effort += std::pow(std::max(a[1], 0.0) * cfg_.impulse_scale * state_.vz, 2);
  effort += std::pow(a[2] * cfg_.posture_rate, 2);
  effort += std::pow(a[3] * cfg_.torque_scale * state_.body_ang_vel, 2);
  r += w.w_effort * effort;
  double pos_limit = std::max(std::abs(state_.body_angle) - 3.14159265, 0.0);
  pos_limit += std::max(pre_clamp_hb - cfg_.h_max, 0.0) +
               std::max(cfg_.h_min - pre_clamp_hb, 0.0);
  r += w.w_pos_limit * pos_limit;
  double eff_limit = 0.0;
  for (double v : raw) eff_limit += std::max(std::abs(v) - 1.0, 0.0);
  r += w.w_effort_limit * eff_limit;
  return r;
}

StepResult ObstacleCourse::step(const Vec& action) {
  StepResult res;
  if (done_) throw std::runtime_error("step() after episode end");
  if (action.size() != 4) throw std::runtime_error("action must have 4 controls");
  for (double v : action)
    if (!std::isfinite(v)) {
      done_ = true;
      res.done = true;
      res.info.cause = Termination::fault;
      res.info.obstacles_passed = passed_;
      return res;
    }

  Vec a(4);
  for (int i = 0; i < 4; ++i) a[i] = std::clamp(action[i], -1.0, 1.0);
  auto& s = state_;
  const double dt = cfg_.dt;

  // horizontal dynamics
  s.vx += dt * (a[0] * cfg_.force_scale - cfg_.drag * s.vx);
  // posture
  const double hb_raw = s.h_b + dt * a[2] * cfg_.posture_rate;
  s.h_b = std::clamp(hb_raw, cfg_.h_min, cfg_.h_max);
  // rotation
  s.body_ang_vel += dt * (a[3] * cfg_.torque_scale - cfg_.ang_damp * s.body_ang_vel);
  s.body_angle += dt * s.body_ang_vel;
  // vertical impulse only from the ground
  if (s.grounded && a[1] > 0.0) {
    s.vz += a[1] * cfg_.impulse_scale;
    s.grounded = false;
  }
  if (!s.grounded) s.vz -= cfg_.gravity * dt;

  const double x_old = s.x;
  double x_new = s.x + dt * s.vx;

  // face collisions between x_old and x_new
  for (const auto& o : obstacles_) {
    if (o.start_x <= x_old || o.start_x > x_new) continue;
    if (o.kind == ObstacleKind::step) {
      if (s.height_z + 1e-9 < ground_level(o.start_x + 1e-9)) {
        x_new = o.start_x - 1e-6;  // blocked by the step face
        s.vx = 0.0;
      }
    } else if (o.kind == ObstacleKind::wall) {
      if (s.height_z < o.size) {
        if (std::abs(s.body_angle - cfg_.kick_angle) <= cfg_.kick_window) {
          s.vz += cfg_.kick_impulse;  // wall kick; pass through
          s.grounded = false;
        } else {
          s.x = o.start_x - 1e-6;
          done_ = true;
          res.info.cause = Termination::wall_crash;
        }
      }
    }
  }
  if (!done_) s.x = x_new;

  // vertical dynamics / support
  const double g_here = ground_level(s.x);
  if (s.grounded) {
    if (std::isnan(g_here)) {
      s.grounded = false;  // walked off into a gap
    } else if (g_here < s.height_z - 1e-9) {
      s.grounded = false;  // stepped off an edge
    } else {
      s.height_z = g_here;
    }
  }
  if (!s.grounded) {
    s.height_z += dt * s.vz;
    if (!std::isnan(g_here) && s.height_z <= g_here && s.vz <= 0.0) {
      s.height_z = g_here;
      s.vz = 0.0;
      s.grounded = true;
    }
  }

  // bar collision: body top above clearance while under the bar
  for (const auto& o : obstacles_) {
    if (o.kind != ObstacleKind::bar) continue;
    if (s.x >= o.start_x && s.x <= o.start_x + o.length &&
        s.height_z + s.h_b > o.size) {
      done_ = true;
      res.info.cause = Termination::bar_crash;
    }
  }
  // fall
  if (s.height_z < -0.5) {
    done_ = true;
    res.info.cause = Termination::fall;
  }
  // numerical fault
  if (!std::isfinite(s.x) || !std::isfinite(s.height_z) ||
      !std::isfinite(s.vx) || !std::isfinite(s.vz)) {
    done_ = true;
    res.info.cause = Termination::fault;
  }

  // obstacles passed (monotone)
  while (passed_ < static_cast<int>(obstacles_.size()) && !done_) {
    const auto& o = obstacles_[passed_];
    const bool cleared =
        o.kind == ObstacleKind::step
            ? (s.x > o.start_x + o.length && s.grounded)
            : (s.x > o.start_x + o.length);
    if (!cleared) break;
    passed_ += 1;
  }

  t_ += 1;
  if (!done_ && t_ >= cfg_.timeout_steps) {
    done_ = true;
    res.info.cause = Termination::timeout;
  }

  if (cfg_.task == TaskKind::walljump || cfg_.task == TaskKind::guideline_demo) {
    res.r_task = guideline_reward(s.x, s.height_z, guideline_);
  } else {
    res.r_task = task_reward(action, a, done_, hb_raw);
  }
  res.done = done_;
  res.info.obstacles_passed = passed_;
  return res;
}

}  // namespace sdax
