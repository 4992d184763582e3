#pragma once

#include "rescrl/cmdp.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace rescrl {

/**
 * Independent, reproducible random streams keyed by (seed, tag, index).
 *
 * Each stream is a std::mt19937_64 seeded with a SplitMix64 hash of the key,
 * so drawing more numbers for one table never shifts another table. Doubles
 * come from the top 53 bits of the engine output, which is identical on every
 * platform (std::uniform_real_distribution is not).
 */
class StreamRng {
public:
  explicit StreamRng(std::uint64_t seed) : seed_(seed) {}

  std::mt19937_64 stream(std::uint64_t tag, std::uint64_t index) const;

  /// Uniform on [0, 1).
  static double uniform(std::mt19937_64& engine);

  static std::uint64_t splitmix64(std::uint64_t x);

private:
  std::uint64_t seed_;
};

struct RandomCmdpSpec {
  std::uint64_t seed = 1;
  int num_states = 20;
  int num_actions = 5;
  int num_constraints = 1;
  double gamma = 0.9;
  /// Target c of the raw constraint V_{g_raw}(rho) >= c, in (-1/(1-gamma), 1/(1-gamma)].
  double target = 0.0;
};

/**
 * Random tabular CMDP: transition rows are normalized i.i.d. uniform(0,1)
 * draws, rewards are uniform on [0,1], raw utilities g_raw uniform on
 * [-1,1], and rho is uniform.
 *
 * The raw constraint V_{g_raw} >= c is stored exactly through the affine map
 * u = (g_raw + 1)/2, b = (c + 1/(1-gamma))/2, so the translated utility is
 * g = (g_raw - (1-gamma) c)/2 and relaxations are in those halved units.
 */
Cmdp gen_random_cmdp(const RandomCmdpSpec& spec);

struct MonitorParams {
  /// Per-step payoff in S_0 (objective), S_1 and S_2 (constraints).
  std::array<double, 3> payoff{1.0, 1.0, 1.2};
  double gamma = 0.9;
  /// Required discounted time values c_1, c_2 in raw (unscaled) units.
  std::array<double, 2> targets{7.0, 9.0};
};

/**
 * Three-location monitor. Two actions with state-dependent meaning:
 * at S_0, action 0 moves to S_1 and action 1 to S_2; at S_i (i = 1, 2),
 * action 0 returns to S_0 and action 1 stays. rho is uniform.
 *
 * Constraint payoffs above 1 are stored as u_i = I(s in S_i) * b_i / k_i with
 * threshold c_i / k_i, k_i = max(1, b_i), which leaves every constraint
 * V_i >= c_i unchanged. The objective payoff must lie in (0, 1].
 */
Cmdp build_monitor3(const MonitorParams& params = {});

/// Inclusive rectangle of grid cells.
struct GridArea {
  int row_lo = 0;
  int row_hi = 0;
  int col_lo = 0;
  int col_hi = 0;

  bool contains(int row, int col) const {
    return row >= row_lo && row <= row_hi && col >= col_lo && col <= col_hi;
  }
};

struct GridMonitorParams {
  int width = 10;
  int height = 10;
  /// S_0 (objective), S_1, S_2.
  std::array<GridArea, 3> areas{GridArea{0, 2, 0, 2}, GridArea{7, 9, 0, 2}, GridArea{7, 9, 7, 9}};
  MonitorParams monitor{};
};

enum GridAction : int { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };

/// Deterministic grid moves; a move off the grid leaves the robot in place.
int grid_next_state(const GridMonitorParams& params, int state, int action);

/// Grid monitor over width*height cells, state = row * width + col, same scaling as monitor3.
/// Throws ConfigError for overlapping or out-of-grid areas.
Cmdp build_grid_monitor(const GridMonitorParams& params = {});

/// max_pi V_{u_i}^pi(rho): the largest threshold b_i the constraint alone can meet.
double max_utility_value(const Cmdp& model, int constraint_index);

}  // namespace rescrl
