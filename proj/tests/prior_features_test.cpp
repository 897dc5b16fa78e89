#include "winpred/prior_features.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "test_helpers.hpp"
#include "winpred/errors.hpp"

using namespace winpred;
using testutil::make_match;
using testutil::small_catalog;

namespace {

std::unordered_map<std::string, PlayerProfile> ten_profiles() {
    std::unordered_map<std::string, PlayerProfile> profiles;
    for (int i = 0; i < 10; ++i) {
        PlayerProfile p;
        p.account_id = "p" + std::to_string(i);
        p.mmr = 4000.0 + 100.0 * i;
        p.mmr_percentile = 0.5 + 0.04 * i;
        profiles.emplace(p.account_id, p);
    }
    return profiles;
}

HeroHistory history(double winrate) {
    HeroHistory h;
    h.winrate = winrate;
    h.xpm = 400;
    h.gpm = 350;
    h.deaths_pm = 0.2;
    h.kills_pm = 0.15;
    h.assists_pm = 0.3;
    h.lasthits_pm = 4.5;
    h.games_played = 20;
    return h;
}

}  // namespace

TEST_SUITE("prior_features") {

TEST_CASE("rival table counts a single match by hand") {
    const auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    const std::vector<MatchRecord> matches = {m};
    const auto table = build_rival_table(matches);
    // Oracle: the one match contributes one radiant win for each of the 25
    // (radiant hero, dire hero) pairs.
    const auto* cell = table.cell(1, 6);
    REQUIRE(cell != nullptr);
    CHECK(cell->games == 1);
    CHECK(cell->radiant_wins == 1);
    CHECK(table.rate(1, 6) == 1.0);
    CHECK(table.cells.size() == 25);
}

TEST_CASE("unseen rival pair falls back to the default rate") {
    const RivalWinrateTable table;
    CHECK(table.rate(3, 9) == 0.5);
}

TEST_CASE("two mirrored results make every pair 0.5") {
    const auto win = make_match("a", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    const auto loss = make_match("b", TeamSide::Dire, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    const std::vector<MatchRecord> matches = {win, loss};
    const auto table = build_rival_table(matches);
    // Oracle: every pair saw 1 win in 2 games.
    for (int r = 1; r <= 5; ++r) {
        for (int d = 6; d <= 10; ++d) {
            CHECK(table.rate(r, d) == 0.5);
        }
    }
}

TEST_CASE("symmetric complement makes rate(a,b) = 1 - rate(b,a)") {
    const auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    const std::vector<MatchRecord> matches = {m};
    const auto table = build_rival_table(matches, true);
    CHECK(table.rate(1, 6) == 1.0);
    CHECK(table.rate(6, 1) == 0.0);
    CHECK(table.cells.size() == 50);
}

TEST_CASE("rival table audit records every consumed match id") {
    const auto m = make_match("only", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    const std::vector<MatchRecord> matches = {m};
    FitAudit audit;
    build_rival_table(matches, false, &audit);
    CHECK(audit.touched.count("only") == 1);
    CHECK(audit.touched.size() == 1);
}

TEST_CASE("hero features: one-hot layout, attribute copy, rival defaults") {
    const auto catalog = small_catalog(12, 3);
    const auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    const RivalWinrateTable empty_table;
    const auto v = extract_hero_features(m, catalog, empty_table);

    FeatureLayout layout;
    layout.hero_count = 12;
    layout.attribute_count = 3;
    REQUIRE(v.size() == layout.selection_size() + layout.attributes_size() + layout.rival_size());

    // Radiant picked hero 1 -> dimension 0 set.
    CHECK(v[0] == 1.0);
    // Dire picked hero 6 -> dimension hero_count + 5.
    CHECK(v[12 + 5] == 1.0);
    // exactly five ones per half
    CHECK(v.segment(0, 12).sum() == 5.0);
    CHECK(v.segment(12, 12).sum() == 5.0);

    // hero 3 sits at radiant slot index 2 (accounts p0..p4 ascending), so its
    // attribute vector appears verbatim at that slot's offset
    const int attr_offset = layout.attributes_offset() + 2 * 3;
    CHECK(v[attr_offset + 0] == 30.0);
    CHECK(v[attr_offset + 1] == 31.0);
    CHECK(v[attr_offset + 2] == 32.0);

    // all-unseen rival pairs -> segment of default rates
    for (int i = 0; i < 25; ++i) {
        CHECK(v[layout.rival_offset() + i] == 0.5);
    }
}

TEST_CASE("hero features reject an unknown hero id") {
    const auto catalog = small_catalog(12, 3);
    auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    m.slots[0].hero_id = 55;
    CHECK_THROWS_AS(extract_hero_features(m, catalog, RivalWinrateTable{}), DataError);
}

TEST_CASE("player features copy present profiles and impute missing ones") {
    const auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    auto profiles = ten_profiles();
    ImputationTable imputation;
    imputation.player_means = Eigen::VectorXd::Constant(20, 123.0);
    imputation.hero_player_means = Eigen::VectorXd::Zero(80);

    auto v = extract_player_features(m, profiles, imputation);
    // slot 0 is account p0
    CHECK(v[0] == 4000.0);
    CHECK(v[1] == 0.5);

    profiles.erase("p3");
    v = extract_player_features(m, profiles, imputation);
    CHECK(v[6] == 123.0);
    CHECK(v[7] == 123.0);

    // all missing -> entire segment equals the means
    v = extract_player_features(m, {}, imputation);
    for (int i = 0; i < 20; ++i) CHECK(v[i] == 123.0);
}

TEST_CASE("hero-player features copy history stats and impute absent pairs") {
    const auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    auto profiles = ten_profiles();
    // p0 plays hero 1 (slot 0), p5 plays hero 6 (slot 5)
    profiles.at("p0").per_hero.emplace(1, history(0.6));
    profiles.at("p5").per_hero.emplace(6, history(0.6));

    ImputationTable imputation;
    imputation.player_means = Eigen::VectorXd::Zero(20);
    imputation.hero_player_means = Eigen::VectorXd::Constant(80, -7.0);

    const auto v = extract_heroplayer_features(m, profiles, imputation);
    CHECK(v[0] == 0.6);  // slot 0 winrate
    // identical history stats give identical 8-blocks
    CHECK(v.segment(0, 8) == v.segment(40, 8));
    // a slot without history for its hero imputes all 8 cells
    for (int j = 0; j < 8; ++j) CHECK(v[8 + j] == -7.0);
}

TEST_CASE("imputation means are fit per dimension from observed values") {
    auto m1 = make_match("a", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    auto m2 = make_match("b", TeamSide::Dire, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    auto profiles = ten_profiles();
    const std::vector<MatchRecord> matches = {m1, m2};
    const auto table = fit_imputation(matches, profiles);
    // slot 0 (account p0, mmr 4000) observed twice -> mean 4000
    CHECK(table.player_means[0] == doctest::Approx(4000.0));
    CHECK(table.player_means[1] == doctest::Approx(0.5));
    // no hero-player history anywhere -> pooled fallback is zero
    CHECK(table.hero_player_means[0] == 0.0);
}

TEST_CASE("assembled vector is 611-dimensional under the default layout") {
    HeroCatalog catalog;
    catalog.hero_count = 113;
    for (int a = 0; a < 26; ++a) catalog.attribute_names.push_back("a" + std::to_string(a));
    for (int h = 0; h < 113; ++h) {
        catalog.attributes.emplace_back(26, 0.5);
    }
    const auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    const std::vector<MatchRecord> matches = {m};
    const auto pipeline = PriorFeaturePipeline::fit(matches, catalog, {});
    const auto v = pipeline.raw(m, catalog, {});
    CHECK(v.size() == 611);
    CHECK(pipeline.layout.total() == 611);
    CHECK(pipeline.layout.selection_size() == 226);
    CHECK(pipeline.layout.attributes_size() == 260);
    CHECK(pipeline.layout.rival_size() == 25);
    CHECK(pipeline.layout.player_size() == 20);
    CHECK(pipeline.layout.hero_player_size() == 80);
    CHECK(pipeline.layout.column_names().size() == 611);
}

TEST_CASE("team swap swaps the feature halves") {
    const auto catalog = small_catalog(12, 3);
    auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    auto profiles = ten_profiles();
    for (int s = 0; s < 10; ++s) {
        profiles.at("p" + std::to_string(s))
            .per_hero.emplace(m.slots[static_cast<std::size_t>(s)].hero_id,
                              history(0.4 + 0.02 * s));
    }

    auto swapped = m;
    for (auto& slot : swapped.slots) {
        slot.side = slot.side == TeamSide::Radiant ? TeamSide::Dire : TeamSide::Radiant;
    }
    canonicalize_slots(swapped.slots);

    const std::vector<MatchRecord> train = {m};
    // symmetric-complement table so the rival relation below holds
    const auto rivals = build_rival_table(train, true);
    const auto imputation = fit_imputation(train, profiles);

    const auto v = assemble_prior_vector(m, catalog, profiles, rivals, imputation);
    const auto w = assemble_prior_vector(swapped, catalog, profiles, rivals, imputation);

    FeatureLayout layout;
    layout.hero_count = 12;
    layout.attribute_count = 3;
    const int h = layout.hero_count;
    CHECK(v.segment(0, h) == w.segment(h, h));
    CHECK(v.segment(h, h) == w.segment(0, h));

    const int attrs = layout.attributes_offset();
    CHECK(v.segment(attrs, 5 * 3) == w.segment(attrs + 5 * 3, 5 * 3));
    CHECK(v.segment(attrs + 5 * 3, 5 * 3) == w.segment(attrs, 5 * 3));

    const int players = layout.player_offset();
    CHECK(v.segment(players, 10) == w.segment(players + 10, 10));
    CHECK(v.segment(players + 10, 10) == w.segment(players, 10));

    const int hp = layout.hero_player_offset();
    CHECK(v.segment(hp, 40) == w.segment(hp + 40, 40));
    CHECK(v.segment(hp + 40, 40) == w.segment(hp, 40));

    // rival segment: swapped match's (r,d) cell equals 1 - original (d,r)
    const int rivals_offset = layout.rival_offset();
    for (int r = 0; r < 5; ++r) {
        for (int d = 0; d < 5; ++d) {
            CHECK(w[rivals_offset + 5 * r + d] ==
                  doctest::Approx(1.0 - v[rivals_offset + 5 * d + r]));
        }
    }
}

TEST_CASE("one-hot halves always hold exactly five ones") {
    const auto catalog = small_catalog(20, 2);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> heroes;
        std::uniform_int_distribution<int> dist(1, 20);
        while (heroes.size() < 10) {
            const int h = dist(rng);
            if (std::find(heroes.begin(), heroes.end(), h) == heroes.end()) heroes.push_back(h);
        }
        const auto m = make_match("m", TeamSide::Radiant,
                                  {heroes[0], heroes[1], heroes[2], heroes[3], heroes[4]},
                                  {heroes[5], heroes[6], heroes[7], heroes[8], heroes[9]});
        const auto v = extract_hero_features(m, catalog, RivalWinrateTable{});
        CHECK(v.segment(0, 20).sum() == 5.0);
        CHECK(v.segment(20, 20).sum() == 5.0);
        for (int i = 0; i < 40; ++i) CHECK((v[i] == 0.0 || v[i] == 1.0));
    }
}

TEST_CASE("normalizer: train set {-1,+1} maps to {-1,+1}") {
    Eigen::MatrixXd x(2, 1);
    x << -1.0, 1.0;
    const auto n = Normalizer::fit(x);
    // Oracle: mean 0, population sd 1.
    CHECK(n.mean[0] == 0.0);
    CHECK(n.sd[0] == 1.0);
    Eigen::VectorXd v(1);
    v << -1.0;
    CHECK(n.apply(v)[0] == -1.0);
}

TEST_CASE("normalizer floors the sd of constant columns") {
    Eigen::MatrixXd x(3, 2);
    x << 5.0, 1.0, 5.0, 2.0, 5.0, 3.0;
    const auto n = Normalizer::fit(x);
    CHECK(n.sd[0] == 1e-8);
    const Eigen::MatrixXd z = n.apply(x);
    for (int r = 0; r < 3; ++r) CHECK(z(r, 0) == 0.0);
}

TEST_CASE("normalized training columns have mean 0 and unit variance") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist(5.0, 3.0);
    Eigen::MatrixXd x(200, 4);
    for (int r = 0; r < 200; ++r) {
        for (int c = 0; c < 4; ++c) x(r, c) = dist(rng) * (c + 1);
    }
    const auto n = Normalizer::fit(x);
    const Eigen::MatrixXd z = n.apply(x);
    for (int c = 0; c < 4; ++c) {
        CHECK(std::abs(z.col(c).mean()) < 1e-9);
        const double var = z.col(c).array().square().mean();
        CHECK(std::abs(var - 1.0) < 1e-6);
    }
}

TEST_CASE("normalizer fit fails on an empty set") {
    Eigen::MatrixXd x(0, 3);
    CHECK_THROWS_AS(Normalizer::fit(x), DataError);
}

TEST_CASE("leak freedom: tables fit on train are unaffected by test content") {
    const auto catalog = small_catalog(12, 3);
    const auto profiles = ten_profiles();
    std::vector<MatchRecord> train;
    for (int i = 0; i < 6; ++i) {
        train.push_back(make_match("t" + std::to_string(i),
                                   i % 2 ? TeamSide::Radiant : TeamSide::Dire,
                                   {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}));
    }
    const auto p1 = PriorFeaturePipeline::fit(train, catalog, profiles);
    const auto p2 = PriorFeaturePipeline::fit(train, catalog, profiles);

    const auto probe = make_match("probe", TeamSide::Radiant, {2, 3, 4, 5, 6}, {1, 7, 8, 9, 10});
    CHECK(p1.raw(probe, catalog, profiles) == p2.raw(probe, catalog, profiles));
}

TEST_CASE("feature csv has the pinned header shape") {
    const auto catalog = small_catalog(12, 3);
    const auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    const std::vector<MatchRecord> matches = {m};
    const auto pipeline = PriorFeaturePipeline::fit(matches, catalog, {});
    const auto x = pipeline.matrix(matches, catalog, {});
    const auto y = match_labels(matches);

    const auto path = std::filesystem::temp_directory_path() / "winpred_features.csv";
    write_feature_csv(path, x, y, pipeline.layout);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header.substr(0, 6) == "label,");
    CHECK(header.find("radiant_pick_1") != std::string::npos);
    CHECK(header.find("rival_r0_d0") != std::string::npos);
    std::string row;
    std::getline(in, row);
    CHECK(row.substr(0, 2) == "1,");
    // 612 comma-separated columns
    CHECK(std::count(header.begin(), header.end(), ',') == pipeline.layout.total());
    std::filesystem::remove(path);
}

}  // TEST_SUITE
