#include "winpred/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "winpred/errors.hpp"

namespace winpred {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

struct SchemaError {};

TeamSide side_from_string(const std::string& s) {
    if (s == "radiant") return TeamSide::Radiant;
    if (s == "dire") return TeamSide::Dire;
    throw SchemaError{};
}

bool slot_missing(const PlayerSlot& slot,
                  const std::unordered_map<std::string, PlayerProfile>& profiles) {
    return !slot.account_id || profiles.find(*slot.account_id) == profiles.end();
}

}  // namespace

HeroCatalog load_hero_stats(const std::filesystem::path& path) {
    const json j = parse_file(path);
    HeroCatalog catalog;
    try {
        catalog.hero_count = j.at("hero_count").get<int>();
        catalog.attribute_names = j.at("attribute_names").get<std::vector<std::string>>();
        catalog.attributes.assign(static_cast<std::size_t>(catalog.hero_count), {});
        for (const auto& [key, values] : j.at("heroes").items()) {
            const int hero_id = std::stoi(key);
            if (hero_id < 1 || hero_id > catalog.hero_count) {
                throw DataError(path.string() + ": hero id " + key + " out of range");
            }
            catalog.attributes[static_cast<std::size_t>(hero_id - 1)] =
                values.get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    const ValidationResult check = validate_catalog(catalog);
    if (!check.ok()) throw DataError(path.string() + ": " + check.violations.front());
    return catalog;
}

std::vector<MatchRecord> load_matches(const std::filesystem::path& path,
                                      const HeroCatalog& catalog, IngestReport* report) {
    const json j = parse_file(path);
    if (!j.is_array()) throw DataError(path.string() + ": expected a JSON array of matches");

    std::vector<MatchRecord> out;
    out.reserve(j.size());
    for (const auto& jm : j) {
        if (report) report->matches_read++;
        MatchRecord m;
        try {
            m.match_id = jm.at("match_id").get<std::string>();
            m.winner = side_from_string(jm.at("winner").get<std::string>());
            m.duration_min = jm.at("duration_min").get<int>();
            const auto& jslots = jm.at("slots");
            int source = 0;
            for (const auto& js : jslots) {
                PlayerSlot slot;
                if (!js.at("account_id").is_null()) {
                    slot.account_id = js.at("account_id").get<std::string>();
                }
                slot.hero_id = js.at("hero_id").get<int>();
                slot.side = side_from_string(js.at("side").get<std::string>());
                slot.source_slot = source++;
                m.slots.push_back(std::move(slot));
            }
        } catch (const json::exception&) {
            if (report) report->matches_dropped_invalid++;
            continue;
        } catch (const SchemaError&) {
            if (report) report->matches_dropped_invalid++;
            continue;
        }
        canonicalize_slots(m.slots);
        if (!validate_match(m, catalog).ok()) {
            if (report) report->matches_dropped_invalid++;
            continue;
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::unordered_map<std::string, PlayerProfile> load_player_profiles(
    const std::filesystem::path& path) {
    const json j = parse_file(path);
    std::unordered_map<std::string, PlayerProfile> out;
    try {
        for (const auto& [account, jp] : j.items()) {
            PlayerProfile p;
            p.account_id = account;
            p.mmr = jp.at("mmr").get<double>();
            p.mmr_percentile = jp.at("mmr_percentile").get<double>();
            if (jp.contains("per_hero")) {
                for (const auto& [hero_key, jh] : jp.at("per_hero").items()) {
                    HeroHistory h;
                    h.winrate = jh.value("winrate", 0.0);
                    h.xpm = jh.value("xpm", 0.0);
                    h.gpm = jh.value("gpm", 0.0);
                    h.deaths_pm = jh.value("deaths_pm", 0.0);
                    h.kills_pm = jh.value("kills_pm", 0.0);
                    h.assists_pm = jh.value("assists_pm", 0.0);
                    h.lasthits_pm = jh.value("lasthits_pm", 0.0);
                    h.games_played = jh.value("games", std::int64_t{0});
                    p.per_hero.emplace(std::stoi(hero_key), h);
                }
            }
            out.emplace(account, std::move(p));
        }
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return out;
}

namespace {

// Returns false when the file's content does not form a valid replay for m.
bool parse_replay(const json& j, const MatchRecord& m, ReplaySeries& out) {
    out.match_id = m.match_id;
    try {
        out.minutes = j.at("minutes").get<int>();
        if (out.minutes < 0) return false;
        const auto& jplayers = j.at("players");
        if (jplayers.size() != 10) return false;
        // source-slot index -> canonical slot index
        std::array<int, 10> to_canonical;
        to_canonical.fill(-1);
        for (std::size_t c = 0; c < m.slots.size(); ++c) {
            const int src = m.slots[c].source_slot;
            if (src < 0 || src >= 10) return false;
            to_canonical[static_cast<std::size_t>(src)] = static_cast<int>(c);
        }
        out.players.assign(10, {});
        std::array<bool, 10> seen{};
        for (const auto& jp : jplayers) {
            const int src = jp.at("slot").get<int>();
            if (src < 0 || src >= 10 || seen[static_cast<std::size_t>(src)]) return false;
            seen[static_cast<std::size_t>(src)] = true;
            auto& slot = out.players[static_cast<std::size_t>(
                to_canonical[static_cast<std::size_t>(src)])];
            slot.gold = jp.at("gold").get<std::vector<double>>();
            slot.xp = jp.at("xp").get<std::vector<double>>();
            slot.deaths = jp.at("deaths").get<std::vector<double>>();
        }
    } catch (const json::exception&) {
        return false;
    }
    return validate_replay(out).ok();
}

}  // namespace

std::unordered_map<std::string, ReplaySeries> load_replays(
    const std::filesystem::path& path, const std::vector<MatchRecord>& matches,
    IngestReport* report) {
    std::unordered_map<std::string, ReplaySeries> out;
    std::unordered_map<std::string, const MatchRecord*> by_id;
    for (const auto& m : matches) by_id.emplace(m.match_id, &m);

    auto load_one = [&](const std::filesystem::path& file) {
        const std::string match_id = file.stem().string();
        auto it = by_id.find(match_id);
        if (it == by_id.end()) return;  // replay for an unknown match
        if (report) report->replays_read++;
        ReplaySeries r;
        if (parse_replay(parse_file(file), *it->second, r)) {
            out.emplace(match_id, std::move(r));
        } else if (report) {
            report->replays_dropped_invalid++;
        }
    };

    if (std::filesystem::is_directory(path)) {
        for (const auto& m : matches) {
            const auto file = path / (m.match_id + ".json");
            if (std::filesystem::exists(file)) load_one(file);
        }
    } else if (std::filesystem::exists(path)) {
        load_one(path);
    }
    return out;
}

std::pair<Dataset, IngestReport> filter_matches(const Dataset& d, int max_missing_players) {
    Dataset out;
    out.catalog = d.catalog;
    out.profiles = d.profiles;
    IngestReport report;
    report.matches_read = d.matches.size();

    std::size_t missing_slots = 0;
    std::size_t total_slots = 0;
    for (const auto& m : d.matches) {
        int missing = 0;
        for (const auto& slot : m.slots) {
            ++total_slots;
            if (slot_missing(slot, d.profiles)) {
                ++missing;
                ++missing_slots;
            }
        }
        if (missing > max_missing_players) {
            report.matches_dropped_missing_players++;
            continue;
        }
        report.matches_kept++;
        out.matches.push_back(m);
        auto it = d.replays.find(m.match_id);
        if (it != d.replays.end()) out.replays.emplace(it->first, it->second);
    }
    if (total_slots > 0) {
        report.missing_profile_rate =
            static_cast<double>(missing_slots) / static_cast<double>(total_slots);
    }
    return {std::move(out), report};
}

std::pair<Dataset, IngestReport> load_dataset(const std::filesystem::path& dir,
                                              int max_missing_players) {
    IngestReport report;
    Dataset d;
    d.catalog = load_hero_stats(dir / "heroes.json");
    d.profiles = load_player_profiles(dir / "players.json");
    d.matches = load_matches(dir / "matches.json", d.catalog, &report);
    d.replays = load_replays(dir / "replays", d.matches, &report);

    for (auto& m : d.matches) {
        auto it = d.replays.find(m.match_id);
        if (it == d.replays.end()) continue;
        m.has_replay = true;
        // A replay longer than the recorded duration is truncated; a shorter
        // one is kept at its own length.
        ReplaySeries& r = it->second;
        if (r.minutes > m.duration_min) {
            r.minutes = m.duration_min;
            const std::size_t len = static_cast<std::size_t>(r.minutes) + 1;
            for (auto& p : r.players) {
                p.gold.resize(len);
                p.xp.resize(len);
                p.deaths.resize(len);
            }
        }
    }

    auto [filtered, filter_report] = filter_matches(d, max_missing_players);
    filter_report.matches_read = report.matches_read;
    filter_report.matches_dropped_invalid = report.matches_dropped_invalid;
    filter_report.replays_read = report.replays_read;
    filter_report.replays_dropped_invalid = report.replays_dropped_invalid;
    return {std::move(filtered), filter_report};
}

void write_dataset(const Dataset& d, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "replays");

    json jheroes;
    jheroes["hero_count"] = d.catalog.hero_count;
    jheroes["attribute_names"] = d.catalog.attribute_names;
    json jmap = json::object();
    for (int h = 1; h <= d.catalog.hero_count; ++h) {
        jmap[std::to_string(h)] = d.catalog.attributes[static_cast<std::size_t>(h - 1)];
    }
    jheroes["heroes"] = std::move(jmap);
    std::ofstream(dir / "heroes.json") << jheroes.dump(1) << "\n";

    json jplayers = json::object();
    {
        std::vector<const PlayerProfile*> sorted;
        sorted.reserve(d.profiles.size());
        for (const auto& [_, p] : d.profiles) sorted.push_back(&p);
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto* a, const auto* b) { return a->account_id < b->account_id; });
        for (const auto* p : sorted) {
            json jp;
            jp["mmr"] = p->mmr;
            jp["mmr_percentile"] = p->mmr_percentile;
            json jh = json::object();
            std::vector<int> hero_ids;
            for (const auto& [hero, _] : p->per_hero) hero_ids.push_back(hero);
            std::sort(hero_ids.begin(), hero_ids.end());
            for (int hero : hero_ids) {
                const HeroHistory& h = p->per_hero.at(hero);
                json one;
                one["winrate"] = h.winrate;
                one["xpm"] = h.xpm;
                one["gpm"] = h.gpm;
                one["deaths_pm"] = h.deaths_pm;
                one["kills_pm"] = h.kills_pm;
                one["assists_pm"] = h.assists_pm;
                one["lasthits_pm"] = h.lasthits_pm;
                one["games"] = h.games_played;
                jh[std::to_string(hero)] = std::move(one);
            }
            jp["per_hero"] = std::move(jh);
            jplayers[p->account_id] = std::move(jp);
        }
    }
    std::ofstream(dir / "players.json") << jplayers.dump(1) << "\n";

    json jmatches = json::array();
    for (const auto& m : d.matches) {
        json jm;
        jm["match_id"] = m.match_id;
        jm["winner"] = to_string(m.winner);
        jm["duration_min"] = m.duration_min;
        json jslots = json::array();
        for (const auto& slot : m.slots) {
            json js;
            if (slot.account_id) {
                js["account_id"] = *slot.account_id;
            } else {
                js["account_id"] = nullptr;
            }
            js["hero_id"] = slot.hero_id;
            js["side"] = to_string(slot.side);
            jslots.push_back(std::move(js));
        }
        jm["slots"] = std::move(jslots);
        jmatches.push_back(std::move(jm));

        auto it = d.replays.find(m.match_id);
        if (it == d.replays.end()) continue;
        const ReplaySeries& r = it->second;
        json jr;
        jr["minutes"] = r.minutes;
        json jp = json::array();
        for (std::size_t s = 0; s < r.players.size(); ++s) {
            json one;
            // Canonical order is the file order we write, so slot == index.
            one["slot"] = static_cast<int>(s);
            one["gold"] = r.players[s].gold;
            one["xp"] = r.players[s].xp;
            one["deaths"] = r.players[s].deaths;
            jp.push_back(std::move(one));
        }
        jr["players"] = std::move(jp);
        std::ofstream(dir / "replays" / (m.match_id + ".json")) << jr.dump() << "\n";
    }
    std::ofstream(dir / "matches.json") << jmatches.dump(1) << "\n";
}

}  // namespace winpred
