#include "winpred/realtime_features.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "test_helpers.hpp"
#include "winpred/errors.hpp"

using namespace winpred;
using testutil::make_match;

namespace {

// Replay where every player on a side has identical series.
ReplaySeries team_replay(const std::string& id, const std::vector<double>& radiant,
                         const std::vector<double>& dire) {
    ReplaySeries r;
    r.match_id = id;
    r.minutes = static_cast<int>(radiant.size()) - 1;
    for (int s = 0; s < 10; ++s) {
        const auto& src = s < 5 ? radiant : dire;
        r.players.push_back({src, src, src});
    }
    return r;
}

DiffSeries series_of(const std::string& id, std::vector<double> values) {
    DiffSeries s;
    s.match_id = id;
    s.values = {values, values, values};
    return s;
}

}  // namespace

TEST_SUITE("realtime_features") {

TEST_CASE("identical team series give all-zero diffs") {
    const auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}, 3);
    const auto replay = team_replay("m", {0, 10, 20, 30}, {0, 10, 20, 30});
    const auto diff = compute_diff_series(replay, m);
    CHECK(diff.last_minute() == 3);
    for (int c = 0; c < kChannels; ++c) {
        for (double v : diff.values[static_cast<std::size_t>(c)]) CHECK(v == 0.0);
    }
}

TEST_CASE("radiant 2000 xp vs dire 1000 xp gives diff 1000") {
    const auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}, 1);
    const auto replay = team_replay("m", {0, 2000}, {0, 1000});
    const auto diff = compute_diff_series(replay, m);
    CHECK(diff.values[kXp][1] == doctest::Approx(1000.0));
}

TEST_CASE("swapping team assignment negates the series") {
    auto m = make_match("m", TeamSide::Radiant, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}, 2);
    const auto replay = team_replay("m", {0, 100, 300}, {0, 50, 100});
    const auto diff = compute_diff_series(replay, m);

    auto swapped = m;
    for (auto& slot : swapped.slots) {
        slot.side = slot.side == TeamSide::Radiant ? TeamSide::Dire : TeamSide::Radiant;
    }
    const auto negated = compute_diff_series(replay, swapped);
    for (int c = 0; c < kChannels; ++c) {
        for (std::size_t t = 0; t < diff.values[0].size(); ++t) {
            CHECK(negated.values[static_cast<std::size_t>(c)][t] ==
                  doctest::Approx(-diff.values[static_cast<std::size_t>(c)][t]));
        }
    }
}

TEST_CASE("quantile bin edges match the sort-and-interpolate oracle") {
    // Uniform values on [0, 24): edges should land near 1, 2, ..., 23.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 24.0);
    std::vector<double> pool(48000);
    for (auto& v : pool) v = dist(rng);

    std::vector<DiffSeries> train = {series_of("s", pool)};
    const auto edges = fit_bins(train, 24);

    // Independent oracle: sort the pool and interpolate order statistics.
    std::vector<double> sorted = pool;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 1; k < 24; ++k) {
        const double pos = static_cast<double>(k) / 24.0 * (sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const double expected =
            sorted[lo] + (pos - lo) * (sorted[lo + 1] - sorted[lo]);
        CHECK(edges.edges[kGold][static_cast<std::size_t>(k - 1)] ==
              doctest::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(edges.edges[kGold][static_cast<std::size_t>(k - 1)] - k) < 0.2);
    }
}

TEST_CASE("identical values degenerate to a single occupied bin") {
    std::vector<DiffSeries> train = {series_of("s", std::vector<double>(100, 7.0))};
    const auto edges = fit_bins(train, 24);
    const auto& e = edges.edges[kGold];
    CHECK(std::is_sorted(e.begin(), e.end()));
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] > e[i - 1]);
    // every data point lands in one bin
    const int b = bin_value(7.0, e);
    for (int i = 0; i < 100; ++i) CHECK(bin_value(7.0, e) == b);
}

TEST_CASE("values clamp to the extreme bins") {
    std::vector<double> ramp(240);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    std::vector<DiffSeries> train = {series_of("s", ramp)};
    const auto edges = fit_bins(train, 24);
    CHECK(bin_value(-1e9, edges.edges[kGold]) == 0);
    CHECK(bin_value(1e9, edges.edges[kGold]) == 23);
}

TEST_CASE("binning is monotone") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist(0.0, 100.0);
    std::vector<double> pool(5000);
    for (auto& v : pool) v = dist(rng);
    std::vector<DiffSeries> train = {series_of("s", pool)};
    const auto edges = fit_bins(train, 24);

    std::uniform_real_distribution<double> probe(-500.0, 500.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = probe(rng);
        const double b = probe(rng);
        const double lo = std::min(a, b);
        const double hi = std::max(a, b);
        CHECK(bin_value(lo, edges.edges[kGold]) <= bin_value(hi, edges.edges[kGold]));
    }
}

TEST_CASE("quantile bins are balanced within a factor of two") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> dist(50.0, 400.0);
    std::vector<double> pool(24000);
    for (auto& v : pool) v = dist(rng);
    std::vector<DiffSeries> train = {series_of("s", pool)};
    const auto edges = fit_bins(train, 24);

    std::array<int, 24> occupancy{};
    for (double v : pool) occupancy[static_cast<std::size_t>(bin_value(v, edges.edges[kGold]))]++;
    const double expected = static_cast<double>(pool.size()) / 24.0;
    for (int b = 0; b < 24; ++b) {
        CHECK(occupancy[static_cast<std::size_t>(b)] > expected / 2.0);
        CHECK(occupancy[static_cast<std::size_t>(b)] < expected * 2.0);
    }
}

TEST_CASE("equal-width bins are available behind the scheme flag") {
    std::vector<double> ramp(240);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    std::vector<DiffSeries> train = {series_of("s", ramp)};
    const auto edges = fit_bins(train, 24, BinScheme::EqualWidth);
    // range [0, 239]: edges at multiples of 239/24
    CHECK(edges.edges[kGold][0] == doctest::Approx(239.0 / 24.0));
    CHECK(edges.edges[kGold][22] == doctest::Approx(239.0 * 23.0 / 24.0));
}

TEST_CASE("fit_bins rejects an empty pool") {
    std::vector<DiffSeries> train;
    CHECK_THROWS_AS(fit_bins(train, 24), DataError);
}

TEST_CASE("window slicing covers minutes t-5..t-1") {
    std::vector<double> ramp(11);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    const auto series = series_of("s", ramp);

    const auto w = slice_window(series, 5);
    CHECK(w.end_minute == 5);
    for (int i = 0; i < kWindowMinutes; ++i) {
        CHECK(w.values[kGold][static_cast<std::size_t>(i)] == static_cast<double>(i));
    }
    const auto last = slice_window(series, 11);  // minutes 6..10 still exist
    CHECK(last.values[kGold][4] == 10.0);
    CHECK_THROWS_AS(slice_window(series, 12), DataError);
    CHECK_THROWS_AS(slice_window(series, 4), DataError);
}

TEST_CASE("monotone series discretizes to nondecreasing bins") {
    std::vector<double> ramp(240);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i) * 3.0;
    std::vector<DiffSeries> train = {series_of("s", ramp)};
    const auto edges = fit_bins(train, 24);
    const auto discrete = discretize(train[0], edges);
    for (std::size_t t = 1; t < discrete.bins[kGold].size(); ++t) {
        CHECK(discrete.bins[kGold][t] >= discrete.bins[kGold][t - 1]);
    }
    for (int v : discrete.bins[kGold]) {
        CHECK(v >= 0);
        CHECK(v <= 23);
    }
}

TEST_CASE("diff csv export carries the pinned header") {
    const auto series = series_of("s", {0.0, 1.5, 3.0});
    const auto path = std::filesystem::temp_directory_path() / "winpred_diff.csv";
    write_diff_csv(series, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "minute,gold_diff,xp_diff,deaths_diff");
    std::string row;
    std::getline(in, row);
    CHECK(row == "0,0,0,0");
    std::getline(in, row);
    CHECK(row == "1,1.5,1.5,1.5");
    std::filesystem::remove(path);
}

}  // TEST_SUITE
