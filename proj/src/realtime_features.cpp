#include "winpred/realtime_features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "winpred/csv.hpp"
#include "winpred/errors.hpp"

namespace winpred {

DiffSeries compute_diff_series(const ReplaySeries& replay, const MatchRecord& m) {
    if (replay.players.size() != 10 || m.slots.size() != 10) {
        throw DataError("diff series requires 10 replay slots and 10 match slots");
    }
    DiffSeries out;
    out.match_id = m.match_id;
    const std::size_t len = static_cast<std::size_t>(replay.minutes) + 1;
    for (auto& channel : out.values) channel.assign(len, 0.0);

    for (int s = 0; s < 10; ++s) {
        const double sign = m.slots[static_cast<std::size_t>(s)].side == TeamSide::Radiant
                                ? 0.2    // +1/5: five-player team mean
                                : -0.2;
        const auto& p = replay.players[static_cast<std::size_t>(s)];
        for (std::size_t t = 0; t < len; ++t) {
            out.values[kGold][t] += sign * p.gold[t];
            out.values[kXp][t] += sign * p.xp[t];
            out.values[kDeaths][t] += sign * p.deaths[t];
        }
    }
    return out;
}

namespace {

std::vector<double> quantile_edges(std::vector<double>& pool, int bins) {
    std::sort(pool.begin(), pool.end());
    const std::size_t n = pool.size();
    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(bins - 1));
    for (int k = 1; k < bins; ++k) {
        // linear interpolation between order statistics
        const double pos = static_cast<double>(k) / bins * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(lo);
        const double hi_val = lo + 1 < n ? pool[lo + 1] : pool[lo];
        edges.push_back(pool[lo] + frac * (hi_val - pool[lo]));
    }
    return edges;
}

std::vector<double> equal_width_edges(const std::vector<double>& pool, int bins) {
    const auto [lo_it, hi_it] = std::minmax_element(pool.begin(), pool.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(bins - 1));
    for (int k = 1; k < bins; ++k) {
        edges.push_back(lo + (hi - lo) * static_cast<double>(k) / bins);
    }
    return edges;
}

void make_strictly_ascending(std::vector<double>& edges) {
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i] <= edges[i - 1]) {
            edges[i] = std::nextafter(edges[i - 1], std::numeric_limits<double>::infinity());
        }
    }
}

}  // namespace

BinEdges fit_bins(std::span<const DiffSeries> train_series, int bins_per_channel,
                  BinScheme scheme, FitAudit* audit) {
    if (bins_per_channel < 2) throw DataError("need at least 2 bins");
    BinEdges out;
    out.bins = bins_per_channel;
    for (int c = 0; c < kChannels; ++c) {
        std::vector<double> pool;
        for (const auto& series : train_series) {
            if (c == 0) audit_note(audit, series.match_id);
            pool.insert(pool.end(), series.values[static_cast<std::size_t>(c)].begin(),
                        series.values[static_cast<std::size_t>(c)].end());
        }
        if (pool.empty()) throw DataError("empty training pool for bin fitting");
        out.edges[static_cast<std::size_t>(c)] = scheme == BinScheme::Quantile
                                                     ? quantile_edges(pool, bins_per_channel)
                                                     : equal_width_edges(pool, bins_per_channel);
        make_strictly_ascending(out.edges[static_cast<std::size_t>(c)]);
    }
    return out;
}

int bin_value(double value, const std::vector<double>& edges) {
    return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), value) - edges.begin());
}

DiscreteDiffSeries discretize(const DiffSeries& series, const BinEdges& edges) {
    DiscreteDiffSeries out;
    out.match_id = series.match_id;
    for (int c = 0; c < kChannels; ++c) {
        const auto& values = series.values[static_cast<std::size_t>(c)];
        auto& bins = out.bins[static_cast<std::size_t>(c)];
        bins.reserve(values.size());
        for (double v : values) {
            bins.push_back(bin_value(v, edges.edges[static_cast<std::size_t>(c)]));
        }
    }
    return out;
}

namespace {

void check_window_bounds(int t, int last_minute) {
    if (t < kWindowMinutes || t - 1 > last_minute) {
        throw DataError("window at minute " + std::to_string(t) +
                        " out of range for series ending at minute " +
                        std::to_string(last_minute));
    }
}

}  // namespace

Window slice_window(const DiffSeries& series, int t) {
    check_window_bounds(t, series.last_minute());
    Window w;
    w.end_minute = t;
    for (int c = 0; c < kChannels; ++c) {
        for (int i = 0; i < kWindowMinutes; ++i) {
            w.values[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] =
                series.values[static_cast<std::size_t>(c)]
                             [static_cast<std::size_t>(t - kWindowMinutes + i)];
        }
    }
    return w;
}

DiscreteWindow slice_window(const DiscreteDiffSeries& series, int t) {
    const int last = static_cast<int>(series.bins[0].size()) - 1;
    check_window_bounds(t, last);
    DiscreteWindow w;
    w.end_minute = t;
    for (int c = 0; c < kChannels; ++c) {
        for (int i = 0; i < kWindowMinutes; ++i) {
            w.bins[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] =
                series.bins[static_cast<std::size_t>(c)]
                           [static_cast<std::size_t>(t - kWindowMinutes + i)];
        }
    }
    return w;
}

bool window_available(const DiffSeries& series, int t) {
    return t >= kWindowMinutes && t - 1 <= series.last_minute();
}

void write_diff_csv(const DiffSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << "minute,gold_diff,xp_diff,deaths_diff\n";
    for (std::size_t t = 0; t < series.values[0].size(); ++t) {
        out << t << "," << fmt_double(series.values[kGold][t]) << ","
            << fmt_double(series.values[kXp][t]) << ","
            << fmt_double(series.values[kDeaths][t]) << "\n";
    }
}

}  // namespace winpred
