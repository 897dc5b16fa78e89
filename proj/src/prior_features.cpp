#include "winpred/prior_features.hpp"

#include <cmath>
#include <fstream>

#include "winpred/csv.hpp"
#include "winpred/errors.hpp"

namespace winpred {

namespace {

std::uint64_t pair_key(int radiant_hero, int dire_hero) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(radiant_hero)) << 32) |
           static_cast<std::uint32_t>(dire_hero);
}

const PlayerProfile* profile_for(
    const PlayerSlot& slot,
    const std::unordered_map<std::string, PlayerProfile>& profiles) {
    if (!slot.account_id) return nullptr;
    auto it = profiles.find(*slot.account_id);
    return it == profiles.end() ? nullptr : &it->second;
}

const HeroHistory* history_for(const PlayerProfile* profile, int hero_id) {
    if (profile == nullptr) return nullptr;
    auto it = profile->per_hero.find(hero_id);
    return it == profile->per_hero.end() ? nullptr : &it->second;
}

}  // namespace

const std::array<const char*, 8> kHeroPlayerStatNames = {
    "winrate", "xpm", "gpm", "deaths_pm", "kills_pm", "assists_pm", "lasthits_pm", "log_games"};

std::array<double, 8> hero_history_stats(const HeroHistory& h) {
    return {h.winrate,  h.xpm,        h.gpm,         h.deaths_pm,
            h.kills_pm, h.assists_pm, h.lasthits_pm, std::log1p(static_cast<double>(h.games_played))};
}

std::vector<std::string> FeatureLayout::column_names() const {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(total()));
    for (int side = 0; side < 2; ++side) {
        for (int h = 1; h <= hero_count; ++h) {
            names.push_back(std::string(side == 0 ? "radiant" : "dire") + "_pick_" +
                            std::to_string(h));
        }
    }
    for (int slot = 0; slot < 10; ++slot) {
        for (int a = 0; a < attribute_count; ++a) {
            names.push_back("slot" + std::to_string(slot) + "_attr" + std::to_string(a));
        }
    }
    for (int r = 0; r < 5; ++r) {
        for (int d = 0; d < 5; ++d) {
            names.push_back("rival_r" + std::to_string(r) + "_d" + std::to_string(d));
        }
    }
    for (int slot = 0; slot < 10; ++slot) {
        names.push_back("slot" + std::to_string(slot) + "_mmr");
        names.push_back("slot" + std::to_string(slot) + "_mmr_pct");
    }
    for (int slot = 0; slot < 10; ++slot) {
        for (const char* stat : kHeroPlayerStatNames) {
            names.push_back("slot" + std::to_string(slot) + "_" + stat);
        }
    }
    return names;
}

const char* to_string(FeatureSet fs) {
    switch (fs) {
        case FeatureSet::Hero: return "hero";
        case FeatureSet::Player: return "player";
        case FeatureSet::HeroPlayer: return "heroplayer";
        case FeatureSet::All: return "all";
    }
    return "all";
}

FeatureSet feature_set_from_string(const std::string& name) {
    if (name == "hero") return FeatureSet::Hero;
    if (name == "player") return FeatureSet::Player;
    if (name == "heroplayer") return FeatureSet::HeroPlayer;
    if (name == "all") return FeatureSet::All;
    throw DataError("unknown feature set \"" + name + "\"");
}

std::pair<int, int> feature_range(const FeatureLayout& layout, FeatureSet fs) {
    switch (fs) {
        case FeatureSet::Hero:
            return {0, layout.selection_size() + layout.attributes_size() + layout.rival_size()};
        case FeatureSet::Player:
            return {layout.player_offset(), layout.player_size()};
        case FeatureSet::HeroPlayer:
            return {layout.hero_player_offset(), layout.hero_player_size()};
        case FeatureSet::All:
            return {0, layout.total()};
    }
    return {0, layout.total()};
}

void RivalWinrateTable::add_match(const MatchRecord& m) {
    const bool radiant_won = m.radiant_won();
    for (int r = 0; r < 5; ++r) {
        for (int d = 5; d < 10; ++d) {
            const int rh = m.slots[static_cast<std::size_t>(r)].hero_id;
            const int dh = m.slots[static_cast<std::size_t>(d)].hero_id;
            Cell& cell = cells[pair_key(rh, dh)];
            cell.games++;
            if (radiant_won) cell.radiant_wins++;
            if (symmetric_complement) {
                Cell& mirror = cells[pair_key(dh, rh)];
                mirror.games++;
                if (!radiant_won) mirror.radiant_wins++;
            }
        }
    }
}

const RivalWinrateTable::Cell* RivalWinrateTable::cell(int radiant_hero, int dire_hero) const {
    auto it = cells.find(pair_key(radiant_hero, dire_hero));
    return it == cells.end() ? nullptr : &it->second;
}

double RivalWinrateTable::rate(int radiant_hero, int dire_hero) const {
    const Cell* c = cell(radiant_hero, dire_hero);
    if (c == nullptr || c->games == 0) return default_rate;
    return static_cast<double>(c->radiant_wins) / static_cast<double>(c->games);
}

double RivalWinrateTable::rate_excluding(int radiant_hero, int dire_hero,
                                         bool radiant_won) const {
    const Cell* c = cell(radiant_hero, dire_hero);
    if (c == nullptr || c->games <= 1) return default_rate;
    return static_cast<double>(c->radiant_wins - (radiant_won ? 1 : 0)) /
           static_cast<double>(c->games - 1);
}

RivalWinrateTable build_rival_table(std::span<const MatchRecord> train_matches,
                                    bool symmetric_complement, FitAudit* audit) {
    RivalWinrateTable table;
    table.symmetric_complement = symmetric_complement;
    for (const auto& m : train_matches) {
        audit_note(audit, m.match_id);
        table.add_match(m);
    }
    return table;
}

ImputationTable fit_imputation(std::span<const MatchRecord> train_matches,
                               const std::unordered_map<std::string, PlayerProfile>& profiles,
                               FitAudit* audit) {
    ImputationTable table;
    table.player_means = Eigen::VectorXd::Zero(20);
    table.hero_player_means = Eigen::VectorXd::Zero(80);
    Eigen::VectorXd player_sums = Eigen::VectorXd::Zero(20);
    Eigen::VectorXd player_counts = Eigen::VectorXd::Zero(20);
    Eigen::VectorXd hp_sums = Eigen::VectorXd::Zero(80);
    Eigen::VectorXd hp_counts = Eigen::VectorXd::Zero(80);

    for (const auto& m : train_matches) {
        audit_note(audit, m.match_id);
        for (int s = 0; s < 10; ++s) {
            const auto& slot = m.slots[static_cast<std::size_t>(s)];
            const PlayerProfile* profile = profile_for(slot, profiles);
            if (profile != nullptr) {
                player_sums[2 * s] += profile->mmr;
                player_sums[2 * s + 1] += profile->mmr_percentile;
                player_counts[2 * s] += 1;
                player_counts[2 * s + 1] += 1;
            }
            const HeroHistory* history = history_for(profile, slot.hero_id);
            if (history != nullptr) {
                const auto stats = hero_history_stats(*history);
                for (int j = 0; j < 8; ++j) {
                    hp_sums[8 * s + j] += stats[static_cast<std::size_t>(j)];
                    hp_counts[8 * s + j] += 1;
                }
            }
        }
    }

    // Per-dimension means; a dimension with no observations falls back to the
    // pooled mean of the same statistic across slots, then to zero.
    auto finalize = [](Eigen::VectorXd& out, const Eigen::VectorXd& sums,
                       const Eigen::VectorXd& counts, int stats_per_slot) {
        for (int j = 0; j < stats_per_slot; ++j) {
            double pooled_sum = 0;
            double pooled_count = 0;
            for (int s = 0; s < 10; ++s) {
                pooled_sum += sums[stats_per_slot * s + j];
                pooled_count += counts[stats_per_slot * s + j];
            }
            const double pooled = pooled_count > 0 ? pooled_sum / pooled_count : 0.0;
            for (int s = 0; s < 10; ++s) {
                const int dim = stats_per_slot * s + j;
                out[dim] = counts[dim] > 0 ? sums[dim] / counts[dim] : pooled;
            }
        }
    };
    finalize(table.player_means, player_sums, player_counts, 2);
    finalize(table.hero_player_means, hp_sums, hp_counts, 8);
    return table;
}

Eigen::VectorXd extract_hero_features(const MatchRecord& m, const HeroCatalog& catalog,
                                      const RivalWinrateTable& rivals, bool exclude_self) {
    FeatureLayout layout;
    layout.hero_count = catalog.hero_count;
    layout.attribute_count = catalog.attribute_count();
    const int size = layout.selection_size() + layout.attributes_size() + layout.rival_size();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(size);

    for (int s = 0; s < 10; ++s) {
        const auto& slot = m.slots[static_cast<std::size_t>(s)];
        if (slot.hero_id < 1 || slot.hero_id > catalog.hero_count) {
            throw DataError("unknown hero_id " + std::to_string(slot.hero_id));
        }
        const int half = s < 5 ? 0 : 1;
        v[half * catalog.hero_count + (slot.hero_id - 1)] = 1.0;

        const auto& attrs = catalog.attributes[static_cast<std::size_t>(slot.hero_id - 1)];
        const int offset = layout.attributes_offset() + s * layout.attribute_count;
        for (int a = 0; a < layout.attribute_count; ++a) {
            v[offset + a] = attrs[static_cast<std::size_t>(a)];
        }
    }
    const int rival_offset = layout.rival_offset();
    for (int r = 0; r < 5; ++r) {
        for (int d = 0; d < 5; ++d) {
            const int rh = m.slots[static_cast<std::size_t>(r)].hero_id;
            const int dh = m.slots[static_cast<std::size_t>(5 + d)].hero_id;
            v[rival_offset + 5 * r + d] = exclude_self
                                              ? rivals.rate_excluding(rh, dh, m.radiant_won())
                                              : rivals.rate(rh, dh);
        }
    }
    return v;
}

Eigen::VectorXd extract_player_features(
    const MatchRecord& m, const std::unordered_map<std::string, PlayerProfile>& profiles,
    const ImputationTable& imputation) {
    Eigen::VectorXd v(20);
    for (int s = 0; s < 10; ++s) {
        const PlayerProfile* profile = profile_for(m.slots[static_cast<std::size_t>(s)], profiles);
        if (profile != nullptr) {
            v[2 * s] = profile->mmr;
            v[2 * s + 1] = profile->mmr_percentile;
        } else {
            v[2 * s] = imputation.player_means[2 * s];
            v[2 * s + 1] = imputation.player_means[2 * s + 1];
        }
    }
    return v;
}

Eigen::VectorXd extract_heroplayer_features(
    const MatchRecord& m, const std::unordered_map<std::string, PlayerProfile>& profiles,
    const ImputationTable& imputation) {
    Eigen::VectorXd v(80);
    for (int s = 0; s < 10; ++s) {
        const auto& slot = m.slots[static_cast<std::size_t>(s)];
        const HeroHistory* history = history_for(profile_for(slot, profiles), slot.hero_id);
        if (history != nullptr) {
            const auto stats = hero_history_stats(*history);
            for (int j = 0; j < 8; ++j) v[8 * s + j] = stats[static_cast<std::size_t>(j)];
        } else {
            v.segment(8 * s, 8) = imputation.hero_player_means.segment(8 * s, 8);
        }
    }
    return v;
}

Eigen::VectorXd assemble_prior_vector(
    const MatchRecord& m, const HeroCatalog& catalog,
    const std::unordered_map<std::string, PlayerProfile>& profiles,
    const RivalWinrateTable& rivals, const ImputationTable& imputation, bool exclude_self) {
    const Eigen::VectorXd hero = extract_hero_features(m, catalog, rivals, exclude_self);
    const Eigen::VectorXd player = extract_player_features(m, profiles, imputation);
    const Eigen::VectorXd hero_player = extract_heroplayer_features(m, profiles, imputation);
    Eigen::VectorXd v(hero.size() + player.size() + hero_player.size());
    v << hero, player, hero_player;
    return v;
}

PriorFeaturePipeline PriorFeaturePipeline::fit(
    std::span<const MatchRecord> train_matches, const HeroCatalog& catalog,
    const std::unordered_map<std::string, PlayerProfile>& profiles, bool symmetric_rivals,
    FitAudit* audit) {
    PriorFeaturePipeline p;
    p.layout.hero_count = catalog.hero_count;
    p.layout.attribute_count = catalog.attribute_count();
    p.rivals = build_rival_table(train_matches, symmetric_rivals, audit);
    p.imputation = fit_imputation(train_matches, profiles, audit);
    return p;
}

Eigen::VectorXd PriorFeaturePipeline::raw(
    const MatchRecord& m, const HeroCatalog& catalog,
    const std::unordered_map<std::string, PlayerProfile>& profiles, bool exclude_self) const {
    return assemble_prior_vector(m, catalog, profiles, rivals, imputation, exclude_self);
}

Eigen::MatrixXd PriorFeaturePipeline::matrix(
    std::span<const MatchRecord> matches, const HeroCatalog& catalog,
    const std::unordered_map<std::string, PlayerProfile>& profiles, FitAudit* audit,
    bool exclude_self) const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(matches.size()), layout.total());
    for (std::size_t i = 0; i < matches.size(); ++i) {
        audit_note(audit, matches[i].match_id);
        x.row(static_cast<Eigen::Index>(i)) =
            raw(matches[i], catalog, profiles, exclude_self).transpose();
    }
    return x;
}

Eigen::VectorXd match_labels(std::span<const MatchRecord> matches) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(matches.size()));
    for (std::size_t i = 0; i < matches.size(); ++i) {
        y[static_cast<Eigen::Index>(i)] = matches[i].radiant_won() ? 1.0 : 0.0;
    }
    return y;
}

void write_feature_csv(const std::filesystem::path& path, const Eigen::MatrixXd& features,
                       const Eigen::VectorXd& labels, const FeatureLayout& layout) {
    if (features.rows() != labels.size()) {
        throw DataError("feature/label row mismatch");
    }
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << "label";
    for (const auto& name : layout.column_names()) out << "," << name;
    out << "\n";
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        out << fmt_double(labels[i]);
        for (Eigen::Index j = 0; j < features.cols(); ++j) {
            out << "," << fmt_double(features(i, j));
        }
        out << "\n";
    }
}

}  // namespace winpred
