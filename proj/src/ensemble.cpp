#include "winpred/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "winpred/csv.hpp"
#include "winpred/errors.hpp"

namespace winpred {

namespace {

double clamp_prob(double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); }

Eigen::VectorXd feature_subset(const Eigen::VectorXd& full, const FeatureLayout& layout,
                               FeatureSet fs) {
    const auto [offset, len] = feature_range(layout, fs);
    return full.segment(offset, len);
}

struct WindowSample {
    std::size_t match_index;
    int end_minute;
};

// Window rows of the concat layout for the given matches, one row per
// (replay match, valid end minute).
struct ConcatRows {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<WindowSample> samples;
};

ConcatRows build_concat_rows(const Dataset& data, const std::vector<MatchRecord>& matches,
                             const Eigen::MatrixXd& prior_rows) {
    ConcatRows out;
    std::vector<DiffSeries> series(matches.size());
    std::size_t n_rows = 0;
    for (std::size_t i = 0; i < matches.size(); ++i) {
        const ReplaySeries* replay = data.replay_for(matches[i].match_id);
        if (replay == nullptr) continue;
        series[i] = compute_diff_series(*replay, matches[i]);
        const int last = series[i].last_minute();
        for (int t = kWindowMinutes; t <= last; ++t) {
            out.samples.push_back({i, t});
            ++n_rows;
        }
    }
    if (n_rows == 0) throw DataError("no replay-bearing matches with enough minutes");

    const Eigen::Index width = prior_rows.cols() + kChannels * kWindowMinutes;
    out.x.resize(static_cast<Eigen::Index>(n_rows), width);
    out.y.resize(static_cast<Eigen::Index>(n_rows));
    for (std::size_t r = 0; r < out.samples.size(); ++r) {
        const auto& sample = out.samples[r];
        const Window w = slice_window(series[sample.match_index], sample.end_minute);
        Eigen::VectorXd row(width);
        row.head(prior_rows.cols()) =
            prior_rows.row(static_cast<Eigen::Index>(sample.match_index));
        Eigen::Index k = prior_rows.cols();
        for (int c = 0; c < kChannels; ++c) {
            for (int i = 0; i < kWindowMinutes; ++i) {
                row[k++] = w.values[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
            }
        }
        out.x.row(static_cast<Eigen::Index>(r)) = row.transpose();
        out.y[static_cast<Eigen::Index>(r)] = matches[sample.match_index].radiant_won() ? 1.0 : 0.0;
    }
    return out;
}

struct RealtimeFit {
    BinEdges edges;
    TransitionModel transitions;
};

RealtimeFit fit_realtime(const Dataset& data, const std::vector<MatchRecord>& matches,
                         const TrainSpec& spec, FitAudit* audit) {
    std::vector<DiffSeries> series;
    std::vector<bool> winners;
    for (const auto& m : matches) {
        const ReplaySeries* replay = data.replay_for(m.match_id);
        if (replay == nullptr || replay->minutes < 1) continue;
        series.push_back(compute_diff_series(*replay, m));
        winners.push_back(m.radiant_won());
    }
    if (series.empty()) throw DataError("no replay-bearing matches to fit the transition model");

    RealtimeFit fit;
    fit.edges = fit_bins(series, spec.bins, spec.bin_scheme, audit);

    std::vector<DiscreteDiffSeries> discrete;
    discrete.reserve(series.size());
    for (const auto& s : series) discrete.push_back(discretize(s, fit.edges));
    std::vector<LabeledSeries> labeled;
    labeled.reserve(discrete.size());
    for (std::size_t i = 0; i < discrete.size(); ++i) {
        labeled.push_back({&discrete[i], winners[i] != false});
    }
    fit.transitions = fit_transition_model(labeled, spec.alpha, fit.edges, audit);
    return fit;
}

std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold_of(n);
    for (std::size_t r = 0; r < n; ++r) {
        fold_of[order[r]] = static_cast<int>(r % static_cast<std::size_t>(folds));
    }
    return fold_of;
}

}  // namespace

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Lr: return "lr";
        case ModelKind::Nn: return "nn";
        case ModelKind::Asm: return "asm";
        case ModelKind::Concat: return "concat";
        case ModelKind::Stacked: return "stacked";
        case ModelKind::TimeBank: return "timebank";
    }
    return "lr";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "lr") return ModelKind::Lr;
    if (name == "nn") return ModelKind::Nn;
    if (name == "asm") return ModelKind::Asm;
    if (name == "concat") return ModelKind::Concat;
    if (name == "stacked") return ModelKind::Stacked;
    if (name == "timebank") return ModelKind::TimeBank;
    throw DataError("unknown model \"" + name + "\"");
}

Eigen::VectorXd concat_features(const Eigen::VectorXd& prior_raw, const Window& w) {
    Eigen::VectorXd v(prior_raw.size() + kChannels * kWindowMinutes);
    v.head(prior_raw.size()) = prior_raw;
    Eigen::Index k = prior_raw.size();
    for (int c = 0; c < kChannels; ++c) {
        for (int i = 0; i < kWindowMinutes; ++i) {
            v[k++] = w.values[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
        }
    }
    return v;
}

double TrainedModel::prior_probability(const Dataset& data, const MatchRecord& m) const {
    switch (kind) {
        case ModelKind::Asm:
            return transitions ? transitions->radiant_prior : 0.5;
        case ModelKind::Nn:
            return prior_mlp->predict(
                feature_subset(features.raw(m, data.catalog, data.profiles),
                               features.layout, feature_set));
        default:
            return prior_lr->predict(
                feature_subset(features.raw(m, data.catalog, data.profiles),
                               features.layout, feature_set));
    }
}

double TrainedModel::predict(const Dataset& data, const MatchRecord& m,
                             std::optional<int> minute) const {
    const double prior = prior_probability(data, m);
    if (!minute.has_value() || *minute < kWindowMinutes ||
        (kind == ModelKind::Lr || kind == ModelKind::Nn)) {
        return clamp_prob(prior);
    }
    const ReplaySeries* replay = data.replay_for(m.match_id);
    if (replay == nullptr) return clamp_prob(prior);
    const DiffSeries series = compute_diff_series(*replay, m);
    const int t = *minute;
    if (!window_available(series, t)) return clamp_prob(prior);

    switch (kind) {
        case ModelKind::Asm: {
            const DiscreteWindow w = slice_window(discretize(series, transitions->edges), t);
            return clamp_prob(posterior_radiant(*transitions, w));
        }
        case ModelKind::Concat: {
            const Window w = slice_window(series, t);
            const Eigen::VectorXd x =
                concat_features(features.raw(m, data.catalog, data.profiles), w);
            return clamp_prob(concat_lr->predict(x));
        }
        case ModelKind::Stacked: {
            const DiscreteWindow w = slice_window(discretize(series, transitions->edges), t);
            Eigen::VectorXd inputs(2);
            inputs << prior, posterior_radiant(*transitions, w);
            return clamp_prob(stacker->predict(inputs));
        }
        case ModelKind::TimeBank: {
            const LinearModel* member = nullptr;
            for (auto it = bank->members.rbegin(); it != bank->members.rend(); ++it) {
                if (it->first <= t) {
                    member = &it->second;
                    break;
                }
            }
            const Window w = slice_window(series, t);
            const Eigen::VectorXd x =
                concat_features(features.raw(m, data.catalog, data.profiles), w);
            return clamp_prob(member != nullptr ? member->predict(x) : concat_lr->predict(x));
        }
        default:
            return clamp_prob(prior);
    }
}

PredictionTrajectory TrainedModel::trajectory(const Dataset& data, const MatchRecord& m) const {
    PredictionTrajectory out;
    out.match_id = m.match_id;
    out.model_tag = to_string(kind);
    out.p_radiant.reserve(static_cast<std::size_t>(m.duration_min) + 1);
    for (int t = 0; t <= m.duration_min; ++t) {
        out.p_radiant.push_back(predict(data, m, t));
    }
    return out;
}

namespace {

LinearModel train_prior_lr(const Eigen::MatrixXd& full_rows, const Eigen::VectorXd& y,
                           const FeatureLayout& layout, FeatureSet fs, const TrainConfig& cfg) {
    const auto [offset, len] = feature_range(layout, fs);
    const Eigen::MatrixXd x = full_rows.middleCols(offset, len);
    return train_lr(x, y, cfg, std::string("prior:") + to_string(fs));
}

}  // namespace

TrainedModel train_model(const Dataset& train, const TrainSpec& spec, FitAudit* audit,
                         StackingAudit* stacking_audit) {
    if (train.matches.empty()) throw DataError("empty training set");

    TrainedModel model;
    model.kind = spec.kind;
    model.feature_set = spec.kind == ModelKind::Lr || spec.kind == ModelKind::Nn
                            ? spec.feature_set
                            : FeatureSet::All;

    if (spec.kind == ModelKind::Asm) {
        const RealtimeFit fit = fit_realtime(train, train.matches, spec, audit);
        model.transitions = fit.transitions;
        return model;
    }

    model.features = PriorFeaturePipeline::fit(train.matches, train.catalog, train.profiles,
                                               spec.symmetric_rivals, audit);
    // Leave-one-out rival rates: a training row must not see its own game.
    const Eigen::MatrixXd full_rows =
        model.features.matrix(train.matches, train.catalog, train.profiles, audit, true);
    const Eigen::VectorXd y = match_labels(train.matches);

    if (spec.kind == ModelKind::Nn) {
        const auto [offset, len] = feature_range(model.features.layout, model.feature_set);
        model.prior_mlp =
            train_mlp(full_rows.middleCols(offset, len), y, spec.optimizer, spec.hidden_size,
                      spec.activation, std::string("prior:") + to_string(model.feature_set));
        return model;
    }

    model.prior_lr =
        train_prior_lr(full_rows, y, model.features.layout, model.feature_set, spec.optimizer);
    if (spec.kind == ModelKind::Lr) return model;

    if (spec.kind == ModelKind::Concat || spec.kind == ModelKind::TimeBank) {
        const ConcatRows rows = build_concat_rows(train, train.matches, full_rows);
        model.concat_lr = train_lr(rows.x, rows.y, spec.optimizer, "concat");

        if (spec.kind == ModelKind::TimeBank) {
            TimeBank bank;
            bank.minutes = spec.bank_minutes;
            bank.min_windows = spec.bank_min_windows;
            for (int minute : spec.bank_minutes) {
                std::vector<Eigen::Index> keep;
                for (std::size_t r = 0; r < rows.samples.size(); ++r) {
                    if (rows.samples[r].end_minute == minute) {
                        keep.push_back(static_cast<Eigen::Index>(r));
                    }
                }
                if (keep.size() < bank.min_windows) continue;
                Eigen::MatrixXd x(static_cast<Eigen::Index>(keep.size()), rows.x.cols());
                Eigen::VectorXd yy(static_cast<Eigen::Index>(keep.size()));
                for (std::size_t i = 0; i < keep.size(); ++i) {
                    x.row(static_cast<Eigen::Index>(i)) = rows.x.row(keep[i]);
                    yy[static_cast<Eigen::Index>(i)] = rows.y[keep[i]];
                }
                bank.members.emplace(
                    minute, train_lr(x, yy, spec.optimizer,
                                     "concat@" + std::to_string(minute)));
            }
            model.bank = std::move(bank);
        }
        return model;
    }

    // Stacked: transition model on the full training set for inference,
    // stacker trained on out-of-fold base predictions.
    const RealtimeFit full_fit = fit_realtime(train, train.matches, spec, audit);
    model.transitions = full_fit.transitions;

    if (spec.stacker_folds < 2) throw DataError("stacker needs at least 2 folds");

    std::vector<double> input_prior;
    std::vector<double> input_posterior;
    std::vector<double> labels;

    auto add_samples = [&](const MatchRecord& m, const LinearModel& base_lr,
                           const PriorFeaturePipeline& base_features,
                           const TransitionModel& base_transitions, int sample_fold,
                           int excluded_fold) {
        const ReplaySeries* replay = train.replay_for(m.match_id);
        if (replay == nullptr) return;
        const DiffSeries series = compute_diff_series(*replay, m);
        if (series.last_minute() < kWindowMinutes) return;
        const double p_prior = base_lr.predict(
            base_features.raw(m, train.catalog, train.profiles));
        const DiscreteDiffSeries discrete = discretize(series, base_transitions.edges);
        for (int t = kWindowMinutes; t <= series.last_minute(); ++t) {
            input_prior.push_back(p_prior);
            input_posterior.push_back(
                posterior_radiant(base_transitions, slice_window(discrete, t)));
            labels.push_back(m.radiant_won() ? 1.0 : 0.0);
            if (stacking_audit != nullptr) {
                stacking_audit->rows.push_back({m.match_id, sample_fold, excluded_fold});
            }
        }
    };

    if (spec.out_of_fold) {
        const std::vector<int> fold_of =
            fold_assignment(train.matches.size(), spec.stacker_folds, spec.optimizer.seed);
        for (int fold = 0; fold < spec.stacker_folds; ++fold) {
            std::vector<MatchRecord> sub;
            sub.reserve(train.matches.size());
            for (std::size_t i = 0; i < train.matches.size(); ++i) {
                if (fold_of[i] != fold) sub.push_back(train.matches[i]);
            }
            if (sub.empty()) continue;
            const PriorFeaturePipeline sub_features = PriorFeaturePipeline::fit(
                sub, train.catalog, train.profiles, spec.symmetric_rivals, audit);
            const Eigen::MatrixXd sub_rows =
                sub_features.matrix(sub, train.catalog, train.profiles, audit, true);
            const LinearModel sub_lr = train_prior_lr(sub_rows, match_labels(sub),
                                                      sub_features.layout, FeatureSet::All,
                                                      spec.optimizer);
            RealtimeFit sub_fit;
            try {
                sub_fit = fit_realtime(train, sub, spec, audit);
            } catch (const DataError&) {
                continue;  // fold complement had no replays
            }
            for (std::size_t i = 0; i < train.matches.size(); ++i) {
                if (fold_of[i] != fold) continue;
                add_samples(train.matches[i], sub_lr, sub_features, sub_fit.transitions,
                            fold, fold);
            }
        }
    } else {
        for (const auto& m : train.matches) {
            add_samples(m, *model.prior_lr, model.features, *model.transitions, -1, -1);
        }
    }

    if (labels.empty()) throw DataError("no stacker training samples");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(labels.size()), 2);
    Eigen::VectorXd yy(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        x(static_cast<Eigen::Index>(i), 0) = input_prior[i];
        x(static_cast<Eigen::Index>(i), 1) = input_posterior[i];
        yy[static_cast<Eigen::Index>(i)] = labels[i];
    }
    model.stacker = train_lr(x, yy, spec.optimizer, "stacker");
    return model;
}

void write_trajectory_csv(const PredictionTrajectory& t, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << "minute,p_radiant\n";
    for (std::size_t minute = 0; minute < t.p_radiant.size(); ++minute) {
        out << minute << "," << fmt_double(t.p_radiant[minute]) << "\n";
    }
}

}  // namespace winpred
