#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "winpred/data_model.hpp"
#include "winpred/normalizer.hpp"

namespace winpred {

// Pre-match feature vector layout, front to back:
//   hero selection   2 x hero_count one-hot (radiant half first)
//   hero attributes  10 slots x attribute_count, canonical slot order
//   rival rates      5 radiant slots x 5 dire slots, row-major
//   player           10 slots x (mmr, mmr_percentile)
//   hero-player      10 slots x 8 history statistics
// Defaults (113 heroes, 26 attributes) give 226+260+25+20+80 = 611 dims.
struct FeatureLayout {
    int hero_count = 113;
    int attribute_count = 26;

    int selection_size() const { return 2 * hero_count; }
    int attributes_size() const { return 10 * attribute_count; }
    int rival_size() const { return 25; }
    int player_size() const { return 20; }
    int hero_player_size() const { return 80; }

    int selection_offset() const { return 0; }
    int attributes_offset() const { return selection_size(); }
    int rival_offset() const { return attributes_offset() + attributes_size(); }
    int player_offset() const { return rival_offset() + rival_size(); }
    int hero_player_offset() const { return player_offset() + player_size(); }
    int total() const { return hero_player_offset() + hero_player_size(); }

    std::vector<std::string> column_names() const;
};

enum class FeatureSet { Hero, Player, HeroPlayer, All };

const char* to_string(FeatureSet fs);
FeatureSet feature_set_from_string(const std::string& name);

// Column range [offset, offset+len) of a feature subset; all five segments of
// the hero family are contiguous at the front.
std::pair<int, int> feature_range(const FeatureLayout& layout, FeatureSet fs);

// Win counts of the radiant-side hero against the dire-side hero over the
// training matches. Unseen pairs fall back to default_rate.
struct RivalWinrateTable {
    struct Cell {
        std::int64_t radiant_wins = 0;
        std::int64_t games = 0;
    };

    std::unordered_map<std::uint64_t, Cell> cells;
    double default_rate = 0.5;
    // When set, each match also contributes the mirrored pair with the
    // complementary outcome, making rate(a,b) == 1 - rate(b,a).
    bool symmetric_complement = false;

    void add_match(const MatchRecord& m);
    double rate(int radiant_hero, int dire_hero) const;
    // Rate with one observed game of the given outcome removed, for building
    // leave-one-out features of matches that are themselves in the table.
    double rate_excluding(int radiant_hero, int dire_hero, bool radiant_won) const;
    const Cell* cell(int radiant_hero, int dire_hero) const;
};

RivalWinrateTable build_rival_table(std::span<const MatchRecord> train_matches,
                                    bool symmetric_complement = false,
                                    FitAudit* audit = nullptr);

// Training means used in place of missing player / hero-player entries.
struct ImputationTable {
    Eigen::VectorXd player_means;       // 20
    Eigen::VectorXd hero_player_means;  // 80
};

ImputationTable fit_imputation(std::span<const MatchRecord> train_matches,
                               const std::unordered_map<std::string, PlayerProfile>& profiles,
                               FitAudit* audit = nullptr);

// exclude_self computes the rival segment with the match's own game removed
// from each pair cell; use it when the match is part of the table (training
// rows), so its own outcome cannot echo into its features.
Eigen::VectorXd extract_hero_features(const MatchRecord& m, const HeroCatalog& catalog,
                                      const RivalWinrateTable& rivals,
                                      bool exclude_self = false);
Eigen::VectorXd extract_player_features(
    const MatchRecord& m, const std::unordered_map<std::string, PlayerProfile>& profiles,
    const ImputationTable& imputation);
Eigen::VectorXd extract_heroplayer_features(
    const MatchRecord& m, const std::unordered_map<std::string, PlayerProfile>& profiles,
    const ImputationTable& imputation);

// The eight per-slot history statistics in feature order.
std::array<double, 8> hero_history_stats(const HeroHistory& h);
extern const std::array<const char*, 8> kHeroPlayerStatNames;

// Rival table + imputation table + layout, everything fit on training
// matches that is needed to turn a match into its raw prior vector.
struct PriorFeaturePipeline {
    FeatureLayout layout;
    RivalWinrateTable rivals;
    ImputationTable imputation;

    static PriorFeaturePipeline fit(std::span<const MatchRecord> train_matches,
                                    const HeroCatalog& catalog,
                                    const std::unordered_map<std::string, PlayerProfile>& profiles,
                                    bool symmetric_rivals = false, FitAudit* audit = nullptr);

    Eigen::VectorXd raw(const MatchRecord& m, const HeroCatalog& catalog,
                        const std::unordered_map<std::string, PlayerProfile>& profiles,
                        bool exclude_self = false) const;
    Eigen::MatrixXd matrix(std::span<const MatchRecord> matches, const HeroCatalog& catalog,
                           const std::unordered_map<std::string, PlayerProfile>& profiles,
                           FitAudit* audit = nullptr, bool exclude_self = false) const;
};

Eigen::VectorXd assemble_prior_vector(
    const MatchRecord& m, const HeroCatalog& catalog,
    const std::unordered_map<std::string, PlayerProfile>& profiles,
    const RivalWinrateTable& rivals, const ImputationTable& imputation,
    bool exclude_self = false);

Eigen::VectorXd match_labels(std::span<const MatchRecord> matches);

// One row per match: label followed by the raw feature columns.
void write_feature_csv(const std::filesystem::path& path, const Eigen::MatrixXd& features,
                       const Eigen::VectorXd& labels, const FeatureLayout& layout);

}  // namespace winpred
