#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "winpred/data_model.hpp"

namespace winpred {

// The three per-minute team-difference channels, in feature order.
enum Channel { kGold = 0, kXp = 1, kDeaths = 2 };
inline constexpr int kChannels = 3;
inline constexpr std::array<const char*, kChannels> kChannelNames = {"gold", "xp", "deaths"};

// Predictions at minute t consume the five minutes t-5..t-1.
inline constexpr int kWindowMinutes = 5;

// Radiant team mean minus Dire team mean at each minute mark 0..last_minute.
struct DiffSeries {
    std::string match_id;
    std::array<std::vector<double>, kChannels> values;

    int last_minute() const { return static_cast<int>(values[0].size()) - 1; }
};

DiffSeries compute_diff_series(const ReplaySeries& replay, const MatchRecord& m);

struct Window {
    int end_minute = 0;
    std::array<std::array<double, kWindowMinutes>, kChannels> values{};
};

struct DiscreteDiffSeries {
    std::string match_id;
    std::array<std::vector<int>, kChannels> bins;
};

struct DiscreteWindow {
    int end_minute = 0;
    std::array<std::array<int, kWindowMinutes>, kChannels> bins{};
};

enum class BinScheme { Quantile, EqualWidth };

// Per-channel edges partitioning the reals into `bins` intervals; strictly
// ascending after deduplication. Values below the first edge map to bin 0,
// values at or above the last edge to bin bins-1.
struct BinEdges {
    int bins = 24;
    std::array<std::vector<double>, kChannels> edges;
};

BinEdges fit_bins(std::span<const DiffSeries> train_series, int bins_per_channel = 24,
                  BinScheme scheme = BinScheme::Quantile, FitAudit* audit = nullptr);

// Number of edges <= value; monotone and total on all finite reals.
int bin_value(double value, const std::vector<double>& edges);

DiscreteDiffSeries discretize(const DiffSeries& series, const BinEdges& edges);

// Throws DataError unless 5 <= t and t-1 <= last minute of the series.
Window slice_window(const DiffSeries& series, int t);
DiscreteWindow slice_window(const DiscreteDiffSeries& series, int t);

bool window_available(const DiffSeries& series, int t);

// minute,gold_diff,xp_diff,deaths_diff
void write_diff_csv(const DiffSeries& series, const std::filesystem::path& path);

}  // namespace winpred
