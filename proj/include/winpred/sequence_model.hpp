#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <span>

#include "winpred/data_model.hpp"
#include "winpred/realtime_features.hpp"

namespace winpred {

// Generative bigram model over the discretized difference channels: one
// row-stochastic transition matrix per (channel, outcome), plus the outcome
// prior. Prediction scores a five-minute window under each outcome and
// applies Bayes' rule; the window's first value is conditioned on, not
// scored.
struct TransitionModel {
    int bins = 24;
    double alpha = 1.0;          // add-alpha smoothing over next states
    double radiant_prior = 0.5;  // P(radiant wins)
    BinEdges edges;
    // trans[channel][outcome](from, to); outcome 1 = radiant win
    std::array<std::array<Eigen::MatrixXd, 2>, kChannels> trans;

    double log_trans(int channel, int outcome, int from, int to) const;
};

struct LabeledSeries {
    const DiscreteDiffSeries* series;
    bool radiant_won;
};

// Counts every consecutive minute pair of every training series, per channel
// and outcome, then normalizes rows with add-alpha smoothing:
//   P(to | from, y) = (count + alpha) / (row_count + bins * alpha).
// With alpha = 0 an unobserved row falls back to the uniform distribution.
TransitionModel fit_transition_model(std::span<const LabeledSeries> train, double alpha,
                                     const BinEdges& edges, FitAudit* audit = nullptr);

// Sum over channels of the log transition probabilities of the four
// within-window steps under the given outcome.
double window_log_likelihood(const TransitionModel& m, const DiscreteWindow& w, int outcome);

// P(radiant wins | window), computed in log space.
double posterior_radiant(const TransitionModel& m, const DiscreteWindow& w);

// channel,outcome,from,to,prob rows for all six matrices.
void write_transition_csv(const TransitionModel& m, const std::filesystem::path& path);

}  // namespace winpred
