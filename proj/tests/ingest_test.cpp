#include "winpred/ingest.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "test_helpers.hpp"
#include "winpred/errors.hpp"

using namespace winpred;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    TempDir() {
        path = fs::temp_directory_path() /
               ("winpred_ingest_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

const char* kHeroes = R"({
  "hero_count": 12,
  "attribute_names": ["str", "agi", "int"],
  "heroes": {
    "1": [1,2,3], "2": [1,2,3], "3": [1,2,3], "4": [1,2,3],
    "5": [1,2,3], "6": [1,2,3], "7": [1,2,3], "8": [1,2,3],
    "9": [1,2,3], "10": [1,2,3], "11": [1,2,3], "12": [1,2,3]
  }
})";

std::string match_json(const std::string& id, const char* winner, int first_hero,
                       bool null_account = false) {
    std::string slots;
    for (int i = 0; i < 10; ++i) {
        if (i) slots += ",";
        const bool radiant = i < 5;
        std::string account = "\"p" + std::to_string(i) + "\"";
        if (null_account && i == 0) account = "null";
        slots += "{\"account_id\": " + account +
                 ", \"hero_id\": " + std::to_string(first_hero + i) +
                 ", \"side\": \"" + (radiant ? "radiant" : "dire") + "\"}";
    }
    return "{\"match_id\": \"" + id + "\", \"winner\": \"" + winner +
           "\", \"duration_min\": 25, \"slots\": [" + slots + "]}";
}

std::string players_json(int count) {
    std::string out = "{";
    for (int i = 0; i < count; ++i) {
        if (i) out += ",";
        out += "\"p" + std::to_string(i) + "\": {\"mmr\": " + std::to_string(4000 + i) +
               ", \"mmr_percentile\": 0.9, \"per_hero\": {\"" + std::to_string(i + 1) +
               "\": {\"winrate\": 0.55, \"xpm\": 420, \"gpm\": 380, \"deaths_pm\": 0.2,"
               " \"kills_pm\": 0.2, \"assists_pm\": 0.3, \"lasthits_pm\": 5.0, \"games\": 12}}}";
    }
    return out + "}";
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("load_matches parses well-formed matches") {
    TempDir dir;
    write(dir.path / "matches.json",
          "[" + match_json("a", "radiant", 1) + "," + match_json("b", "dire", 2) + "," +
              match_json("c", "radiant", 3) + "]");
    const auto catalog = testutil::small_catalog();
    IngestReport report;
    const auto matches = load_matches(dir.path / "matches.json", catalog, &report);
    REQUIRE(matches.size() == 3);
    CHECK(report.matches_read == 3);
    CHECK(matches[0].match_id == "a");
    CHECK(matches[0].winner == TeamSide::Radiant);
    CHECK(matches[1].winner == TeamSide::Dire);
    CHECK(matches[0].duration_min == 25);
    // canonical order: radiant first
    for (int i = 0; i < 5; ++i) CHECK(matches[0].slots[i].side == TeamSide::Radiant);
}

TEST_CASE("load_matches drops a match with a duplicate hero") {
    TempDir dir;
    // hero range 3..12 overlaps with itself when first_hero is reused per side
    std::string bad = match_json("dup", "radiant", 1);
    // duplicate hero: set two slots to hero 7
    const auto pos = bad.find("\"hero_id\": 1,");
    bad.replace(pos, std::string("\"hero_id\": 1,").size(), "\"hero_id\": 7,");
    write(dir.path / "matches.json", "[" + bad + "]");
    IngestReport report;
    const auto matches = load_matches(dir.path / "matches.json", testutil::small_catalog(), &report);
    CHECK(matches.empty());
    CHECK(report.matches_dropped_invalid == 1);
}

TEST_CASE("load_matches on an empty array returns an empty list") {
    TempDir dir;
    write(dir.path / "matches.json", "[]");
    const auto matches = load_matches(dir.path / "matches.json", testutil::small_catalog());
    CHECK(matches.empty());
}

TEST_CASE("malformed JSON is a hard error with an offset") {
    TempDir dir;
    write(dir.path / "matches.json", "[{\"match_id\": }]");
    CHECK_THROWS_AS(load_matches(dir.path / "matches.json", testutil::small_catalog()), DataError);
    write(dir.path / "heroes.json", "{broken");
    CHECK_THROWS_AS(load_hero_stats(dir.path / "heroes.json"), DataError);
    CHECK_THROWS_AS(load_matches(dir.path / "missing.json", testutil::small_catalog()), DataError);
}

TEST_CASE("load_hero_stats parses a catalog") {
    TempDir dir;
    write(dir.path / "heroes.json", kHeroes);
    const auto catalog = load_hero_stats(dir.path / "heroes.json");
    CHECK(catalog.hero_count == 12);
    CHECK(catalog.attribute_count() == 3);
    CHECK(catalog.attributes[4] == std::vector<double>{1, 2, 3});
}

TEST_CASE("load_player_profiles tolerates an empty per-hero map") {
    TempDir dir;
    write(dir.path / "players.json",
          R"({"p0": {"mmr": 5000, "mmr_percentile": 0.97, "per_hero": {}}})");
    const auto profiles = load_player_profiles(dir.path / "players.json");
    REQUIRE(profiles.count("p0") == 1);
    CHECK(profiles.at("p0").per_hero.empty());
    CHECK(profiles.at("p0").mmr == 5000);
}

TEST_CASE("replay with a decreasing gold series is rejected and counted") {
    TempDir dir;
    write(dir.path / "matches.json", "[" + match_json("a", "radiant", 1) + "]");
    std::string players;
    for (int i = 0; i < 10; ++i) {
        if (i) players += ",";
        const char* gold = (i == 2) ? "[10, 5, 20]" : "[0, 10, 20]";
        players += "{\"slot\": " + std::to_string(i) + ", \"gold\": " + gold +
                   ", \"xp\": [0, 10, 20], \"deaths\": [0, 0, 1]}";
    }
    write(dir.path / "replays" / "a.json",
          "{\"minutes\": 2, \"players\": [" + players + "]}");

    const auto catalog = testutil::small_catalog();
    const auto matches = load_matches(dir.path / "matches.json", catalog);
    IngestReport report;
    const auto replays = load_replays(dir.path / "replays", matches, &report);
    CHECK(replays.empty());
    CHECK(report.replays_read == 1);
    CHECK(report.replays_dropped_invalid == 1);
}

TEST_CASE("replay slots are remapped onto canonical slot order") {
    TempDir dir;
    // Slot file order: accounts p9..p0 reversed sides, so canonical order
    // differs from file order.
    std::string slots;
    for (int i = 0; i < 10; ++i) {
        if (i) slots += ",";
        const bool radiant = i >= 5;  // radiant listed second in the file
        slots += "{\"account_id\": \"p" + std::to_string(9 - i) +
                 "\", \"hero_id\": " + std::to_string(i + 1) +
                 ", \"side\": \"" + (radiant ? "radiant" : "dire") + "\"}";
    }
    write(dir.path / "matches.json",
          "[{\"match_id\": \"a\", \"winner\": \"radiant\", \"duration_min\": 2, "
          "\"slots\": [" + slots + "]}]");

    std::string players;
    for (int i = 0; i < 10; ++i) {
        if (i) players += ",";
        const double base = i * 100.0;
        players += "{\"slot\": " + std::to_string(i) + ", \"gold\": [" +
                   std::to_string(base) + ", " + std::to_string(base + 1) +
                   ", " + std::to_string(base + 2) +
                   "], \"xp\": [0, 1, 2], \"deaths\": [0, 0, 0]}";
    }
    write(dir.path / "replays" / "a.json", "{\"minutes\": 2, \"players\": [" + players + "]}");

    const auto catalog = testutil::small_catalog();
    const auto matches = load_matches(dir.path / "matches.json", catalog);
    const auto replays = load_replays(dir.path / "replays", matches, nullptr);
    REQUIRE(replays.count("a") == 1);
    const auto& replay = replays.at("a");
    // Canonical slot 0 is the radiant player with the smallest account id:
    // p0, which sat at file slot 9 (gold base 900).
    CHECK(matches[0].slots[0].account_id == "p0");
    CHECK(matches[0].slots[0].source_slot == 9);
    CHECK(replay.players[0].gold[0] == 900.0);
}

TEST_CASE("filter_matches drops matches with too many missing players") {
    Dataset d;
    d.catalog = testutil::small_catalog();
    // profiles exist only for p2..p9: p0 and p1 are missing
    for (int i = 2; i < 10; ++i) {
        PlayerProfile p;
        p.account_id = "p" + std::to_string(i);
        d.profiles.emplace(p.account_id, p);
    }
    auto with_missing = [&](const std::string& id, int n_missing) {
        auto m = testutil::make_match(id, TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
        // make the first n_missing slots point at unknown accounts
        for (int i = 0; i < n_missing; ++i) {
            m.slots[static_cast<std::size_t>(i)].account_id = "ghost" + std::to_string(i);
        }
        return m;
    };
    d.matches.push_back(with_missing("none", 0));
    d.matches.push_back(with_missing("two", 2));
    d.matches.push_back(with_missing("three", 3));

    const auto [kept, report] = filter_matches(d, 2);
    CHECK(kept.matches.size() == 2);
    CHECK(report.matches_kept == 2);
    CHECK(report.matches_dropped_missing_players == 1);
    CHECK(report.matches_read == 3);
    CHECK(report.matches_kept + report.matches_dropped_missing_players == report.matches_read);
    CHECK(kept.matches[0].match_id == "none");
    CHECK(kept.matches[1].match_id == "two");
}

TEST_CASE("filtering is monotone in max_missing_players") {
    Dataset d;
    d.catalog = testutil::small_catalog();
    for (int i = 5; i < 10; ++i) {
        PlayerProfile p;
        p.account_id = "p" + std::to_string(i);
        d.profiles.emplace(p.account_id, p);
    }
    for (int k = 0; k < 6; ++k) {
        auto m = testutil::make_match("m" + std::to_string(k), TeamSide::Radiant,
                                      {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
        for (int i = 0; i < k; ++i) {
            m.slots[static_cast<std::size_t>(i)].account_id = "ghost" + std::to_string(i);
        }
        d.matches.push_back(m);
    }
    std::size_t previous = 0;
    for (int max_missing = 0; max_missing <= 10; ++max_missing) {
        const auto [kept, report] = filter_matches(d, max_missing);
        CHECK(kept.matches.size() >= previous);
        previous = kept.matches.size();
    }
}

TEST_CASE("dataset round-trips through write_dataset/load_dataset deterministically") {
    TempDir dir;
    write(dir.path / "heroes.json", kHeroes);
    write(dir.path / "players.json", players_json(10));
    write(dir.path / "matches.json",
          "[" + match_json("a", "radiant", 1) + "," + match_json("b", "dire", 2) + "]");

    const auto [d1, report1] = load_dataset(dir.path);
    REQUIRE(d1.matches.size() == 2);

    TempDir out;
    write_dataset(d1, out.path);
    const auto [d2, report2] = load_dataset(out.path);
    REQUIRE(d2.matches.size() == d1.matches.size());
    for (std::size_t i = 0; i < d1.matches.size(); ++i) {
        CHECK(d1.matches[i].match_id == d2.matches[i].match_id);
        CHECK(d1.matches[i].winner == d2.matches[i].winner);
        for (std::size_t s = 0; s < 10; ++s) {
            CHECK(d1.matches[i].slots[s].account_id == d2.matches[i].slots[s].account_id);
            CHECK(d1.matches[i].slots[s].hero_id == d2.matches[i].slots[s].hero_id);
        }
    }
    CHECK(d2.profiles.size() == d1.profiles.size());

    // fully deterministic reload
    const auto [d3, report3] = load_dataset(out.path);
    CHECK(d3.matches.size() == d2.matches.size());
    CHECK(d3.profiles.size() == d2.profiles.size());
}

TEST_CASE("replay longer than the match duration is truncated at load") {
    TempDir dir;
    write(dir.path / "heroes.json", kHeroes);
    write(dir.path / "players.json", players_json(10));
    // duration_min is 25 but write a 2-minute match with a 4-minute replay
    std::string m = match_json("a", "radiant", 1);
    const std::string needle = "\"duration_min\": 25";
    m.replace(m.find(needle), needle.size(), "\"duration_min\": 2");
    write(dir.path / "matches.json", "[" + m + "]");
    std::string players;
    for (int i = 0; i < 10; ++i) {
        if (i) players += ",";
        players += "{\"slot\": " + std::to_string(i) +
                   ", \"gold\": [0, 1, 2, 3, 4], \"xp\": [0, 1, 2, 3, 4], "
                   "\"deaths\": [0, 0, 0, 0, 0]}";
    }
    write(dir.path / "replays" / "a.json", "{\"minutes\": 4, \"players\": [" + players + "]}");

    const auto [d, report] = load_dataset(dir.path);
    REQUIRE(d.replays.count("a") == 1);
    CHECK(d.replays.at("a").minutes == 2);
    CHECK(d.replays.at("a").players[0].gold.size() == 3);
    CHECK(d.matches[0].has_replay);
}

}  // TEST_SUITE
