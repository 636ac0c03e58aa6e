#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "arl/mdp.hpp"

namespace arl {

struct LearnerConfig {
  int K = 1;
  double rho = 0.0;
  double delta = 0.05;

  // log(2 S A H K / delta), natural log.
  double iota(int S, int A, int H) const {
    return std::log(2.0 * S * A * H * static_cast<double>(K) / delta);
  }

  void validate() const;
};

// Interval [lower, upper] on the robust value at s1 issued after an episode.
struct Certificate {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon = 0.0;
  int episode = 0;
};

struct EpisodeRecord {
  Certificate certificate;
  double best_width = 0.0;  // smallest epsilon so far
  double episode_return = 0.0;
};

// Handed to observers once per episode, after the certificate is issued.
struct EpisodeView {
  int episode;                        // 1-based
  const DeterministicPolicy& policy;  // the agent policy executed in the episode
  const Certificate& certificate;
  double best_width;
  const Trajectory& trajectory;
};

struct RunOptions {
  bool keep_trajectories = true;
  std::function<void(const EpisodeView&)> on_episode;
};

struct RunResult {
  DeterministicPolicy pi_out;
  std::vector<EpisodeRecord> log;
  std::vector<Trajectory> trajectories;
};

}  // namespace arl
