#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "winpred/data_model.hpp"

namespace winpred {

// Synthetic match generator with a known generative process. Latent hero
// strengths, player skills and hero-player affinities drive both the match
// outcomes and the emitted catalog/profile/history files, so every model can
// be validated against the Bayes-optimal prior predictor.
//
// Replays follow a random walk whose per-minute drift points toward the
// winning team; with drift_flip_minute > 0 the drift direction reverses from
// that minute on, creating time-heterogeneous signal.
struct SynthConfig {
    std::size_t n_matches = 2000;
    int hero_count = 113;
    int attribute_count = 26;
    int player_count = 1000;
    std::uint64_t seed = 1;

    double hero_strength_scale = 0.15;
    double player_skill_scale = 0.15;
    double hero_player_affinity_scale = 0.15;
    double realtime_drift_scale = 8.0;
    double realtime_noise_scale = 70.0;
    int drift_flip_minute = 0;  // 0 = off

    double replay_fraction = 0.26;
    double duration_mean = 37.75;
    double duration_sd = 10.42;
    int min_duration = 10;
    int max_duration = 90;
    double missing_profile_rate = 0.02;
};

struct GroundTruth {
    struct MatchTruth {
        double strength_diff = 0.0;  // logit of the radiant win probability
        double p_radiant = 0.5;
        bool radiant_won = false;
    };

    std::unordered_map<std::string, MatchTruth> matches;
};

// Deterministic given cfg.seed. Throws DataError on infeasible configs
// (fewer than 10 heroes or players).
std::pair<Dataset, GroundTruth> generate_dataset(const SynthConfig& cfg);

// Accuracy of the optimal predictor that knows each match's true win
// probability: mean of max(p, 1-p).
double bayes_accuracy(const GroundTruth& gt);

}  // namespace winpred
