#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "winpred/data_model.hpp"

namespace winpred {

// File formats (all JSON):
//
//   matches.json   [{"match_id": str, "winner": "radiant"|"dire",
//                    "duration_min": int,
//                    "slots": [{"account_id": str|null, "hero_id": int,
//                               "side": "radiant"|"dire"} x10]}]
//   heroes.json    {"hero_count": int, "attribute_names": [str xA],
//                   "heroes": {"<id>": [num xA]}}
//   players.json   {"<account_id>": {"mmr": num, "mmr_percentile": num,
//                   "per_hero": {"<hero_id>": {"winrate": num, "xpm": num,
//                    "gpm": num, "deaths_pm": num, "kills_pm": num,
//                    "assists_pm": num, "lasthits_pm": num, "games": int}}}}
//   replays/<match_id>.json
//                  {"minutes": int, "players": [{"slot": int, "gold": [num],
//                    "xp": [num], "deaths": [num]} x10]}
//
// Replay "slot" indices refer to the position of the player in the match's
// file-order slot array; the loader maps them onto canonical slot order.

struct IngestReport {
    std::size_t matches_read = 0;
    std::size_t matches_kept = 0;
    std::size_t matches_dropped_missing_players = 0;
    std::size_t matches_dropped_invalid = 0;
    double missing_profile_rate = 0.0;

    std::size_t replays_read = 0;
    std::size_t replays_dropped_invalid = 0;
};

HeroCatalog load_hero_stats(const std::filesystem::path& path);

// Invalid records are counted in report->matches_dropped_invalid and skipped;
// unreadable files and malformed JSON throw DataError.
std::vector<MatchRecord> load_matches(const std::filesystem::path& path,
                                      const HeroCatalog& catalog,
                                      IngestReport* report = nullptr);

std::unordered_map<std::string, PlayerProfile> load_player_profiles(
    const std::filesystem::path& path);

// Accepts a directory of <match_id>.json files or a single replay file.
// Absent replays are fine; invalid ones are counted and skipped.
std::unordered_map<std::string, ReplaySeries> load_replays(
    const std::filesystem::path& path, const std::vector<MatchRecord>& matches,
    IngestReport* report = nullptr);

// Drops matches with more than max_missing_players slots whose account is
// unknown or has no profile record. Also fills report->missing_profile_rate
// over the slots of the input matches.
std::pair<Dataset, IngestReport> filter_matches(const Dataset& d,
                                                int max_missing_players = 2);

// heroes.json + players.json + matches.json + replays/, merged, validated and
// filtered. The combined report reconciles: read = kept + dropped_invalid +
// dropped_missing_players.
std::pair<Dataset, IngestReport> load_dataset(const std::filesystem::path& dir,
                                              int max_missing_players = 2);

// Inverse of load_dataset; writes the exact formats above.
void write_dataset(const Dataset& d, const std::filesystem::path& dir);

}  // namespace winpred
