#include "rescrl/environments.hpp"

#include "rescrl/errors.hpp"
#include "rescrl/oracle.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

namespace rescrl {

namespace {

enum StreamTag : std::uint64_t { kTransitions = 1, kReward = 2, kUtility = 3 };

}  // namespace

std::uint64_t StreamRng::splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 StreamRng::stream(std::uint64_t tag, std::uint64_t index) const {
  const std::uint64_t key = splitmix64(splitmix64(seed_) ^ splitmix64(tag * 0x100000001b3ULL + index));
  return std::mt19937_64(key);
}

double StreamRng::uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

Cmdp gen_random_cmdp(const RandomCmdpSpec& spec) {
  const int S = spec.num_states;
  const int A = spec.num_actions;
  const int m = spec.num_constraints;
  if (S < 1 || A < 1 || m < 0) throw ConfigError("random CMDP sizes must be positive");
  if (!(spec.gamma >= 0.0 && spec.gamma < 1.0)) throw ConfigError("gamma must lie in [0,1)");
  const double horizon = 1.0 / (1.0 - spec.gamma);
  if (!(spec.target > -horizon && spec.target <= horizon))
    throw ConfigError("random CMDP target must lie in (-1/(1-gamma), 1/(1-gamma)]");

  const StreamRng rng(spec.seed);
  Matrix transitions(S * A, S);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      auto eng = rng.stream(kTransitions, static_cast<std::uint64_t>(s * A + a));
      auto row = transitions.row(s * A + a);
      for (int next = 0; next < S; ++next) row(next) = StreamRng::uniform(eng);
      row /= row.sum();
    }
  }
  Matrix reward(S, A);
  {
    auto eng = rng.stream(kReward, 0);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) reward(s, a) = StreamRng::uniform(eng);
  }
  std::vector<Matrix> utilities;
  std::vector<double> thresholds;
  for (int i = 0; i < m; ++i) {
    auto eng = rng.stream(kUtility, static_cast<std::uint64_t>(i));
    Matrix u(S, A);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double raw = 2.0 * StreamRng::uniform(eng) - 1.0;
        u(s, a) = 0.5 * (raw + 1.0);
      }
    }
    utilities.push_back(std::move(u));
    thresholds.push_back(0.5 * (spec.target + horizon));
  }
  return make_cmdp(spec.gamma, Vector::Constant(S, 1.0 / S), std::move(transitions),
                   std::move(reward), std::move(utilities), std::move(thresholds));
}

namespace {

/// Shared monitor assembly: `area_of(s)` is 0, 1, 2 or -1 (no area).
Cmdp build_monitor(int num_states, int num_actions, const std::function<int(int, int)>& next_state,
                   const std::function<int(int)>& area_of, const MonitorParams& params) {
  const auto& b = params.payoff;
  if (!(b[0] > 0.0 && b[0] <= 1.0)) throw ConfigError("objective payoff b_0 must lie in (0, 1]");
  if (!(b[1] > 0.0 && b[2] > 0.0)) throw ConfigError("constraint payoffs must be positive");

  Matrix transitions = Matrix::Zero(num_states * num_actions, num_states);
  Matrix reward = Matrix::Zero(num_states, num_actions);
  std::vector<Matrix> utilities(2, Matrix::Zero(num_states, num_actions));
  std::vector<double> thresholds(2);
  for (int i = 0; i < 2; ++i) thresholds[i] = params.targets[i] / std::max(1.0, b[i + 1]);

  for (int s = 0; s < num_states; ++s) {
    const int area = area_of(s);
    for (int a = 0; a < num_actions; ++a) {
      transitions(s * num_actions + a, next_state(s, a)) = 1.0;
      if (area == 0) reward(s, a) = b[0];
      if (area == 1 || area == 2) utilities[area - 1](s, a) = b[area] / std::max(1.0, b[area]);
    }
  }
  return make_cmdp(params.gamma, Vector::Constant(num_states, 1.0 / num_states),
                   std::move(transitions), std::move(reward), std::move(utilities),
                   std::move(thresholds));
}

}  // namespace

Cmdp build_monitor3(const MonitorParams& params) {
  auto next = [](int s, int a) {
    if (s == 0) return a == 0 ? 1 : 2;
    return a == 0 ? 0 : s;
  };
  return build_monitor(3, 2, next, [](int s) { return s; }, params);
}

int grid_next_state(const GridMonitorParams& params, int state, int action) {
  const int row = state / params.width;
  const int col = state % params.width;
  int r = row;
  int c = col;
  switch (action) {
    case kLeft: --c; break;
    case kRight: ++c; break;
    case kUp: --r; break;
    case kDown: ++r; break;
    default: throw std::invalid_argument("grid action out of range");
  }
  if (r < 0 || r >= params.height || c < 0 || c >= params.width) return state;
  return r * params.width + c;
}

Cmdp build_grid_monitor(const GridMonitorParams& params) {
  if (params.width < 1 || params.height < 1) throw ConfigError("grid dimensions must be positive");
  for (int i = 0; i < 3; ++i) {
    const auto& area = params.areas[i];
    if (area.row_lo > area.row_hi || area.col_lo > area.col_hi || area.row_lo < 0 ||
        area.col_lo < 0 || area.row_hi >= params.height || area.col_hi >= params.width)
      throw ConfigError("area S_" + std::to_string(i) + " is empty or leaves the grid");
  }
  const int num_states = params.width * params.height;
  std::vector<int> area_of(num_states, -1);
  for (int s = 0; s < num_states; ++s) {
    for (int i = 0; i < 3; ++i) {
      if (!params.areas[i].contains(s / params.width, s % params.width)) continue;
      if (area_of[s] >= 0)
        throw ConfigError("areas S_" + std::to_string(area_of[s]) + " and S_" +
                          std::to_string(i) + " overlap");
      area_of[s] = i;
    }
  }
  return build_monitor(
      num_states, 4, [&](int s, int a) { return grid_next_state(params, s, a); },
      [&](int s) { return area_of[s]; }, params.monitor);
}

double max_utility_value(const Cmdp& model, int constraint_index) {
  if (constraint_index < 0 || constraint_index >= model.num_constraints())
    throw std::out_of_range("constraint index out of range");
  return solve_mdp(model, model.utilities[constraint_index]).value;
}

}  // namespace rescrl
