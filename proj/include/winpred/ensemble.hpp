#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "winpred/classifiers.hpp"
#include "winpred/data_model.hpp"
#include "winpred/prior_features.hpp"
#include "winpred/realtime_features.hpp"
#include "winpred/sequence_model.hpp"

namespace winpred {

enum class ModelKind { Lr, Nn, Asm, Concat, Stacked, TimeBank };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct TrainSpec {
    ModelKind kind = ModelKind::Lr;
    FeatureSet feature_set = FeatureSet::All;  // prior LR/NN input selection
    TrainConfig optimizer;
    int hidden_size = 64;
    Activation activation = Activation::Sigmoid;

    double alpha = 1.0;  // transition-model smoothing
    int bins = 24;
    BinScheme bin_scheme = BinScheme::Quantile;
    bool symmetric_rivals = false;

    int stacker_folds = 10;
    bool out_of_fold = true;  // false trains the stacker on in-sample inputs

    std::vector<int> bank_minutes = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    std::size_t bank_min_windows = 50;
};

// One LR per covered prediction minute, trained only on windows ending at
// that minute; prediction picks the nearest covered minute at or below t and
// falls back to the pooled concat model otherwise.
struct TimeBank {
    std::vector<int> minutes;
    std::map<int, LinearModel> members;
    std::size_t min_windows = 50;
};

struct PredictionTrajectory {
    std::string match_id;
    std::string model_tag;
    std::vector<double> p_radiant;  // index = minute, 0..duration
};

// Records which folds produced each stacker training sample, so tests can
// verify that no sample's inputs came from a base model that saw it.
struct StackingAudit {
    struct Row {
        std::string match_id;
        int sample_fold = -1;
        int base_excluded_fold = -1;
    };

    std::vector<Row> rows;
};

// A fitted predictor of any kind together with the feature tables it needs
// at inference time. predict() is total: minutes below 5, missing replays
// and short series all fall back to the prior-only probability.
struct TrainedModel {
    ModelKind kind = ModelKind::Lr;
    FeatureSet feature_set = FeatureSet::All;
    PriorFeaturePipeline features;

    std::optional<LinearModel> prior_lr;
    std::optional<MLPModel> prior_mlp;
    std::optional<TransitionModel> transitions;
    std::optional<LinearModel> concat_lr;
    std::optional<LinearModel> stacker;
    std::optional<TimeBank> bank;

    double prior_probability(const Dataset& data, const MatchRecord& m) const;
    double predict(const Dataset& data, const MatchRecord& m,
                   std::optional<int> minute) const;
    PredictionTrajectory trajectory(const Dataset& data, const MatchRecord& m) const;
};

TrainedModel train_model(const Dataset& train, const TrainSpec& spec,
                         FitAudit* audit = nullptr, StackingAudit* stacking_audit = nullptr);

// [prior vector | gold window | xp window | deaths window], 15 window dims.
Eigen::VectorXd concat_features(const Eigen::VectorXd& prior_raw, const Window& w);

void write_trajectory_csv(const PredictionTrajectory& t, const std::filesystem::path& path);

}  // namespace winpred
