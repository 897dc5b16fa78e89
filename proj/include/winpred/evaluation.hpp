#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "winpred/ensemble.hpp"

namespace winpred {

struct EvalResult {
    double accuracy = 0.0;
    std::size_t n = 0;
};

// Fraction of matches where (p >= 0.5) agrees with the winner; a tie at
// exactly 0.5 counts as a Radiant prediction. Real-time evaluation at minute
// t includes only test matches with duration >= t and replay length >= t.
// Throws DataError when the evaluation set is empty.
EvalResult evaluate_accuracy(const TrainedModel& model, const Dataset& test,
                             std::optional<int> minute = std::nullopt);

// Pools the per-minute evaluations into one accuracy over all eligible
// (match, minute) pairs; minutes with no eligible match contribute nothing.
EvalResult evaluate_pooled(const TrainedModel& model, const Dataset& test,
                           const std::vector<int>& minutes);

std::size_t eligible_count(const Dataset& test, int minute);

// One grid cell: trains on the fold complement, returns validation accuracy.
struct CvCell {
    std::string name;
    std::function<double(const Eigen::MatrixXd&, const Eigen::VectorXd&,
                         const Eigen::MatrixXd&, const Eigen::VectorXd&)>
        run;
};

struct CvOutcome {
    std::vector<std::pair<std::string, double>> scores;  // mean CV accuracy per cell
    std::size_t best_index = 0;
};

CvOutcome cross_validate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const std::vector<CvCell>& grid, int folds, std::uint64_t seed);

// hidden-size x activation grid for the two-layer network.
struct NnCvTable {
    std::vector<int> hidden_sizes;
    std::vector<Activation> activations;
    Eigen::MatrixXd accuracy;  // activations x hidden_sizes
    int best_hidden = 0;
    Activation best_activation = Activation::Sigmoid;
};

NnCvTable cross_validate_nn(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const std::vector<int>& hidden_sizes,
                            const std::vector<Activation>& activations, int folds,
                            const TrainConfig& cfg);

struct AblationReport {
    struct Row {
        FeatureSet features;
        ModelKind model;
        double accuracy = 0.0;
        std::size_t n = 0;
    };

    std::vector<Row> rows;
};

// Trains one prior model per feature subset and family with identical
// configuration, evaluated on the test side.
AblationReport ablation(const Dataset& train, const Dataset& test, const TrainSpec& base,
                        const std::vector<ModelKind>& families = {ModelKind::Lr, ModelKind::Nn},
                        FitAudit* audit = nullptr);

struct MinuteCurve {
    struct Point {
        int minute = 0;
        double accuracy = 0.0;
        std::size_t n = 0;
    };

    std::vector<std::string> tags;
    std::vector<std::vector<Point>> per_model;  // parallel to tags
};

// Minutes with no eligible test match are absent, not zero.
MinuteCurve minute_curve(const std::vector<const TrainedModel*>& models, const Dataset& test,
                         const std::vector<int>& minutes);

struct DurationCurve {
    struct Bucket {
        int start = 0;  // right-open [start, start + width)
        double accuracy = 0.0;
        std::size_t n = 0;
    };

    int width = 5;
    std::vector<Bucket> buckets;
};

DurationCurve duration_curve(const TrainedModel& prior_model, const Dataset& test,
                             int bucket_width = 5);

void write_ablation_csv(const AblationReport& report, const std::filesystem::path& path);
void write_minute_csv(const MinuteCurve& curve, const std::filesystem::path& path);
void write_duration_csv(const DurationCurve& curve, const std::filesystem::path& path);
void write_nn_cv_csv(const NnCvTable& table, const std::filesystem::path& path);

void print_ablation(const AblationReport& report, std::ostream& os);
void print_minute_curve(const MinuteCurve& curve, std::ostream& os);
void print_duration_curve(const DurationCurve& curve, std::ostream& os);
void print_nn_cv(const NnCvTable& table, std::ostream& os);

}  // namespace winpred
