#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace winpred {

// Radiant is the positive side everywhere: label 1, front half of feature
// vectors, positive sign of team difference series.
enum class TeamSide { Radiant, Dire };

inline const char* to_string(TeamSide s) {
    return s == TeamSide::Radiant ? "radiant" : "dire";
}

struct PlayerSlot {
    // Empty optional means the account is unknown (private profile).
    std::optional<std::string> account_id;
    int hero_id = 0;
    TeamSide side = TeamSide::Radiant;
    // Index of this slot in the source file, before canonical reordering.
    // Replay files reference players by this index.
    int source_slot = 0;
};

struct MatchRecord {
    std::string match_id;
    TeamSide winner = TeamSide::Radiant;
    // Canonical order: Radiant slots 0..4, Dire slots 5..9, each team sorted
    // by ascending account id with missing accounts last.
    std::vector<PlayerSlot> slots;
    int duration_min = 0;
    bool has_replay = false;

    bool radiant_won() const { return winner == TeamSide::Radiant; }
};

// Sorts slots into the canonical order described on MatchRecord.
void canonicalize_slots(std::vector<PlayerSlot>& slots);

struct HeroCatalog {
    int hero_count = 0;
    std::vector<std::string> attribute_names;
    // attributes[hero_id - 1], each of size attribute_names.size().
    std::vector<std::vector<double>> attributes;

    int attribute_count() const { return static_cast<int>(attribute_names.size()); }
};

// Per (player, hero) history statistics. The first four are the core rates;
// the remaining three plus games_played fill out the 8-statistic block used
// by the hero-player features (games enters log-scaled).
struct HeroHistory {
    double winrate = 0.0;
    double xpm = 0.0;
    double gpm = 0.0;
    double deaths_pm = 0.0;
    double kills_pm = 0.0;
    double assists_pm = 0.0;
    double lasthits_pm = 0.0;
    std::int64_t games_played = 0;
};

struct PlayerProfile {
    std::string account_id;
    double mmr = 0.0;
    double mmr_percentile = 0.0;  // in [0,1]
    std::unordered_map<int, HeroHistory> per_hero;
};

struct ReplaySeries {
    struct SlotSeries {
        // Cumulative totals at minute marks 0..minutes, nondecreasing.
        std::vector<double> gold;
        std::vector<double> xp;
        std::vector<double> deaths;
    };

    std::string match_id;
    int minutes = 0;  // last minute index; every series has minutes+1 entries
    // One entry per canonical match slot, same order as MatchRecord::slots.
    std::vector<SlotSeries> players;
};

struct Dataset {
    std::vector<MatchRecord> matches;
    HeroCatalog catalog;
    std::unordered_map<std::string, PlayerProfile> profiles;
    std::unordered_map<std::string, ReplaySeries> replays;

    const ReplaySeries* replay_for(const std::string& match_id) const {
        auto it = replays.find(match_id);
        return it == replays.end() ? nullptr : &it->second;
    }
};

struct ValidationResult {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

// Pure and idempotent; violations are data, not faults.
ValidationResult validate_match(const MatchRecord& m, const HeroCatalog& catalog);

// Checks slot count, uniform series lengths and monotone cumulative totals.
ValidationResult validate_replay(const ReplaySeries& r);

ValidationResult validate_catalog(const HeroCatalog& c);

// Deterministic disjoint partition of the matches; catalog and profiles are
// carried to both sides, replays filtered to each side's matches.
// Throws DataError if either side would be empty.
std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double test_fraction,
                                          std::uint64_t seed);

// Records every match id consumed while fitting tables, normalizers, bins or
// models, so a run can prove that no test match leaked into any fit.
struct FitAudit {
    std::unordered_set<std::string> touched;

    void note(const std::string& match_id) { touched.insert(match_id); }
};

inline void audit_note(FitAudit* audit, const std::string& match_id) {
    if (audit != nullptr) audit->note(match_id);
}

}  // namespace winpred
