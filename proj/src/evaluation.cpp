#include "winpred/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

#include "winpred/csv.hpp"
#include "winpred/errors.hpp"

namespace winpred {

namespace {

bool eligible_at(const Dataset& test, const MatchRecord& m, int minute) {
    if (m.duration_min < minute) return false;
    const ReplaySeries* replay = test.replay_for(m.match_id);
    return replay != nullptr && replay->minutes >= minute;
}

bool correct_prediction(double p, const MatchRecord& m) {
    const bool predicted_radiant = p >= 0.5;
    return predicted_radiant == m.radiant_won();
}

}  // namespace

std::size_t eligible_count(const Dataset& test, int minute) {
    std::size_t n = 0;
    for (const auto& m : test.matches) {
        if (eligible_at(test, m, minute)) ++n;
    }
    return n;
}

EvalResult evaluate_accuracy(const TrainedModel& model, const Dataset& test,
                             std::optional<int> minute) {
    EvalResult result;
    std::size_t correct = 0;
    for (const auto& m : test.matches) {
        if (minute.has_value() && !eligible_at(test, m, *minute)) continue;
        if (correct_prediction(model.predict(test, m, minute), m)) ++correct;
        ++result.n;
    }
    if (result.n == 0) throw DataError("empty evaluation set");
    result.accuracy = static_cast<double>(correct) / static_cast<double>(result.n);
    return result;
}

EvalResult evaluate_pooled(const TrainedModel& model, const Dataset& test,
                           const std::vector<int>& minutes) {
    EvalResult result;
    std::size_t correct = 0;
    for (int minute : minutes) {
        for (const auto& m : test.matches) {
            if (!eligible_at(test, m, minute)) continue;
            if (correct_prediction(model.predict(test, m, minute), m)) ++correct;
            ++result.n;
        }
    }
    if (result.n == 0) throw DataError("empty evaluation set");
    result.accuracy = static_cast<double>(correct) / static_cast<double>(result.n);
    return result;
}

CvOutcome cross_validate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const std::vector<CvCell>& grid, int folds, std::uint64_t seed) {
    if (grid.empty()) throw DataError("empty hyperparameter grid");
    if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
    const std::size_t n = static_cast<std::size_t>(x.rows());
    if (n < static_cast<std::size_t>(folds)) throw DataError("fewer samples than folds");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed ^ 0xc3a5c85c97cb3127ULL);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold_of(n);
    for (std::size_t r = 0; r < n; ++r) {
        fold_of[order[r]] = static_cast<int>(r % static_cast<std::size_t>(folds));
    }

    CvOutcome outcome;
    outcome.scores.reserve(grid.size());
    for (const auto& cell : grid) {
        double sum = 0.0;
        for (int fold = 0; fold < folds; ++fold) {
            std::vector<Eigen::Index> train_rows;
            std::vector<Eigen::Index> val_rows;
            for (std::size_t i = 0; i < n; ++i) {
                (fold_of[i] == fold ? val_rows : train_rows)
                    .push_back(static_cast<Eigen::Index>(i));
            }
            Eigen::MatrixXd xt(static_cast<Eigen::Index>(train_rows.size()), x.cols());
            Eigen::VectorXd yt(static_cast<Eigen::Index>(train_rows.size()));
            for (std::size_t i = 0; i < train_rows.size(); ++i) {
                xt.row(static_cast<Eigen::Index>(i)) = x.row(train_rows[i]);
                yt[static_cast<Eigen::Index>(i)] = y[train_rows[i]];
            }
            Eigen::MatrixXd xv(static_cast<Eigen::Index>(val_rows.size()), x.cols());
            Eigen::VectorXd yv(static_cast<Eigen::Index>(val_rows.size()));
            for (std::size_t i = 0; i < val_rows.size(); ++i) {
                xv.row(static_cast<Eigen::Index>(i)) = x.row(val_rows[i]);
                yv[static_cast<Eigen::Index>(i)] = y[val_rows[i]];
            }
            sum += cell.run(xt, yt, xv, yv);
        }
        outcome.scores.emplace_back(cell.name, sum / folds);
    }
    outcome.best_index = static_cast<std::size_t>(
        std::max_element(outcome.scores.begin(), outcome.scores.end(),
                         [](const auto& a, const auto& b) { return a.second < b.second; }) -
        outcome.scores.begin());
    return outcome;
}

namespace {

double holdout_accuracy(const Eigen::MatrixXd& xv, const Eigen::VectorXd& yv,
                        const std::function<double(const Eigen::VectorXd&)>& predict) {
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < xv.rows(); ++i) {
        const double p = predict(xv.row(i).transpose());
        if ((p >= 0.5) == (yv[i] == 1.0)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(xv.rows());
}

}  // namespace

NnCvTable cross_validate_nn(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const std::vector<int>& hidden_sizes,
                            const std::vector<Activation>& activations, int folds,
                            const TrainConfig& cfg) {
    std::vector<CvCell> grid;
    for (const Activation act : activations) {
        for (const int hidden : hidden_sizes) {
            CvCell cell;
            cell.name = std::string(to_string(act)) + "/" + std::to_string(hidden);
            cell.run = [hidden, act, cfg](const Eigen::MatrixXd& xt, const Eigen::VectorXd& yt,
                                          const Eigen::MatrixXd& xv, const Eigen::VectorXd& yv) {
                const MLPModel m = train_mlp(xt, yt, cfg, hidden, act);
                return holdout_accuracy(xv, yv,
                                        [&m](const Eigen::VectorXd& row) { return m.predict(row); });
            };
            grid.push_back(std::move(cell));
        }
    }
    const CvOutcome outcome = cross_validate(x, y, grid, folds, cfg.seed);

    NnCvTable table;
    table.hidden_sizes = hidden_sizes;
    table.activations = activations;
    table.accuracy.resize(static_cast<Eigen::Index>(activations.size()),
                          static_cast<Eigen::Index>(hidden_sizes.size()));
    std::size_t k = 0;
    for (std::size_t a = 0; a < activations.size(); ++a) {
        for (std::size_t h = 0; h < hidden_sizes.size(); ++h) {
            table.accuracy(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(h)) =
                outcome.scores[k++].second;
        }
    }
    const std::size_t best = outcome.best_index;
    table.best_activation = activations[best / hidden_sizes.size()];
    table.best_hidden = hidden_sizes[best % hidden_sizes.size()];
    return table;
}

AblationReport ablation(const Dataset& train, const Dataset& test, const TrainSpec& base,
                        const std::vector<ModelKind>& families, FitAudit* audit) {
    AblationReport report;
    for (const FeatureSet fs :
         {FeatureSet::Hero, FeatureSet::Player, FeatureSet::HeroPlayer, FeatureSet::All}) {
        for (const ModelKind family : families) {
            TrainSpec spec = base;
            spec.kind = family;
            spec.feature_set = fs;
            const TrainedModel model = train_model(train, spec, audit);
            const EvalResult result = evaluate_accuracy(model, test);
            report.rows.push_back({fs, family, result.accuracy, result.n});
        }
    }
    return report;
}

MinuteCurve minute_curve(const std::vector<const TrainedModel*>& models, const Dataset& test,
                         const std::vector<int>& minutes) {
    MinuteCurve curve;
    for (const TrainedModel* model : models) {
        curve.tags.push_back(to_string(model->kind));
        std::vector<MinuteCurve::Point> points;
        for (int minute : minutes) {
            if (eligible_count(test, minute) == 0) continue;  // absent, not zero
            const EvalResult r = evaluate_accuracy(*model, test, minute);
            points.push_back({minute, r.accuracy, r.n});
        }
        curve.per_model.push_back(std::move(points));
    }
    return curve;
}

DurationCurve duration_curve(const TrainedModel& prior_model, const Dataset& test,
                             int bucket_width) {
    if (bucket_width < 1) throw DataError("bucket width must be positive");
    DurationCurve curve;
    curve.width = bucket_width;
    std::map<int, std::pair<std::size_t, std::size_t>> counts;  // start -> (correct, n)
    for (const auto& m : test.matches) {
        const int start = (m.duration_min / bucket_width) * bucket_width;
        auto& [correct, n] = counts[start];
        if (correct_prediction(prior_model.predict(test, m, std::nullopt), m)) ++correct;
        ++n;
    }
    for (const auto& [start, pair] : counts) {
        curve.buckets.push_back({start,
                                 static_cast<double>(pair.first) /
                                     static_cast<double>(pair.second),
                                 pair.second});
    }
    return curve;
}

void write_ablation_csv(const AblationReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << "feature_set,model,accuracy,n\n";
    for (const auto& row : report.rows) {
        out << to_string(row.features) << "," << to_string(row.model) << ","
            << fmt_double(row.accuracy) << "," << row.n << "\n";
    }
}

void write_minute_csv(const MinuteCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << "model,minute,accuracy,n\n";
    for (std::size_t i = 0; i < curve.tags.size(); ++i) {
        for (const auto& point : curve.per_model[i]) {
            out << curve.tags[i] << "," << point.minute << "," << fmt_double(point.accuracy)
                << "," << point.n << "\n";
        }
    }
}

void write_duration_csv(const DurationCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << "bucket_start,bucket_end,accuracy,n\n";
    for (const auto& bucket : curve.buckets) {
        out << bucket.start << "," << bucket.start + curve.width << ","
            << fmt_double(bucket.accuracy) << "," << bucket.n << "\n";
    }
}

void write_nn_cv_csv(const NnCvTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << "activation,hidden,mean_cv_accuracy\n";
    for (std::size_t a = 0; a < table.activations.size(); ++a) {
        for (std::size_t h = 0; h < table.hidden_sizes.size(); ++h) {
            out << to_string(table.activations[a]) << "," << table.hidden_sizes[h] << ","
                << fmt_double(table.accuracy(static_cast<Eigen::Index>(a),
                                             static_cast<Eigen::Index>(h)))
                << "\n";
        }
    }
}

void print_ablation(const AblationReport& report, std::ostream& os) {
    os << "feature set   ";
    for (const ModelKind family : {ModelKind::Lr, ModelKind::Nn}) {
        bool present = false;
        for (const auto& row : report.rows) present = present || row.model == family;
        if (present) os << "  " << to_string(family) << "      ";
    }
    os << "\n";
    for (const FeatureSet fs :
         {FeatureSet::Hero, FeatureSet::Player, FeatureSet::HeroPlayer, FeatureSet::All}) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-14s", to_string(fs));
        os << line;
        for (const auto& row : report.rows) {
            if (row.features != fs) continue;
            os << "  " << fmt_fixed(100.0 * row.accuracy, 2) << "%";
        }
        os << "\n";
    }
}

void print_minute_curve(const MinuteCurve& curve, std::ostream& os) {
    for (std::size_t i = 0; i < curve.tags.size(); ++i) {
        os << curve.tags[i] << ":\n";
        for (const auto& point : curve.per_model[i]) {
            os << "  minute " << point.minute << ": " << fmt_fixed(100.0 * point.accuracy, 2)
               << "% (n=" << point.n << ")\n";
        }
    }
}

void print_duration_curve(const DurationCurve& curve, std::ostream& os) {
    for (const auto& bucket : curve.buckets) {
        os << "  [" << bucket.start << "," << bucket.start + curve.width
           << ") min: " << fmt_fixed(100.0 * bucket.accuracy, 2) << "% (n=" << bucket.n
           << ")\n";
    }
}

void print_nn_cv(const NnCvTable& table, std::ostream& os) {
    os << "            ";
    for (int hidden : table.hidden_sizes) {
        char cell[32];
        std::snprintf(cell, sizeof(cell), "%8d", hidden);
        os << cell;
    }
    os << "\n";
    for (std::size_t a = 0; a < table.activations.size(); ++a) {
        char head[32];
        std::snprintf(head, sizeof(head), "%-12s", to_string(table.activations[a]));
        os << head;
        for (std::size_t h = 0; h < table.hidden_sizes.size(); ++h) {
            char cell[32];
            std::snprintf(cell, sizeof(cell), "%7.2f%%",
                          100.0 * table.accuracy(static_cast<Eigen::Index>(a),
                                                 static_cast<Eigen::Index>(h)));
            os << cell;
        }
        os << "\n";
    }
}

}  // namespace winpred
