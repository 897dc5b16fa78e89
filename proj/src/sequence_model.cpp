#include "winpred/sequence_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "winpred/csv.hpp"
#include "winpred/errors.hpp"

namespace winpred {

double TransitionModel::log_trans(int channel, int outcome, int from, int to) const {
    return std::log(trans[static_cast<std::size_t>(channel)][static_cast<std::size_t>(outcome)](
        from, to));
}

TransitionModel fit_transition_model(std::span<const LabeledSeries> train, double alpha,
                                     const BinEdges& edges, FitAudit* audit) {
    if (train.empty()) throw DataError("no training series for the transition model");
    if (alpha < 0.0) throw DataError("smoothing alpha must be nonnegative");

    TransitionModel model;
    model.bins = edges.bins;
    model.alpha = alpha;
    model.edges = edges;

    std::array<std::array<Eigen::MatrixXd, 2>, kChannels> counts;
    for (auto& channel : counts) {
        for (auto& matrix : channel) matrix = Eigen::MatrixXd::Zero(model.bins, model.bins);
    }

    std::int64_t radiant_wins = 0;
    for (const auto& [series, radiant_won] : train) {
        audit_note(audit, series->match_id);
        if (radiant_won) ++radiant_wins;
        const std::size_t outcome = radiant_won ? 1 : 0;
        for (std::size_t c = 0; c < kChannels; ++c) {
            const auto& bins = series->bins[c];
            if (bins.size() < 2) throw DataError("series shorter than two minutes");
            for (std::size_t t = 1; t < bins.size(); ++t) {
                counts[c][outcome](bins[t - 1], bins[t]) += 1.0;
            }
        }
    }

    const double n = static_cast<double>(train.size());
    model.radiant_prior =
        std::clamp(static_cast<double>(radiant_wins) / n, 1e-6, 1.0 - 1e-6);

    const double denom_smoothing = static_cast<double>(model.bins) * alpha;
    for (std::size_t c = 0; c < kChannels; ++c) {
        for (std::size_t y = 0; y < 2; ++y) {
            Eigen::MatrixXd& p = model.trans[c][y];
            p.resize(model.bins, model.bins);
            for (int from = 0; from < model.bins; ++from) {
                const double row_count = counts[c][y].row(from).sum();
                if (row_count + denom_smoothing == 0.0) {
                    p.row(from).setConstant(1.0 / model.bins);
                    continue;
                }
                p.row(from) = (counts[c][y].row(from).array() + alpha) /
                              (row_count + denom_smoothing);
            }
        }
    }
    return model;
}

double window_log_likelihood(const TransitionModel& m, const DiscreteWindow& w, int outcome) {
    double ll = 0.0;
    for (int c = 0; c < kChannels; ++c) {
        for (int i = 1; i < kWindowMinutes; ++i) {
            ll += m.log_trans(c, outcome,
                              w.bins[static_cast<std::size_t>(c)][static_cast<std::size_t>(i - 1)],
                              w.bins[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)]);
        }
    }
    return ll;
}

double posterior_radiant(const TransitionModel& m, const DiscreteWindow& w) {
    const double log_win = std::log(m.radiant_prior) + window_log_likelihood(m, w, 1);
    const double log_loss = std::log(1.0 - m.radiant_prior) + window_log_likelihood(m, w, 0);
    const double peak = std::max(log_win, log_loss);
    const double denominator = std::exp(log_win - peak) + std::exp(log_loss - peak);
    return std::exp(log_win - peak) / denominator;
}

void write_transition_csv(const TransitionModel& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << "channel,outcome,from,to,prob\n";
    for (int c = 0; c < kChannels; ++c) {
        for (int y = 0; y < 2; ++y) {
            const auto& p = m.trans[static_cast<std::size_t>(c)][static_cast<std::size_t>(y)];
            for (int from = 0; from < m.bins; ++from) {
                for (int to = 0; to < m.bins; ++to) {
                    out << kChannelNames[static_cast<std::size_t>(c)] << "," << y << "," << from
                        << "," << to << "," << fmt_double(p(from, to)) << "\n";
                }
            }
        }
    }
}

}  // namespace winpred
