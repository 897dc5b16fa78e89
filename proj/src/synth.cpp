#include "winpred/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <vector>

#include "winpred/classifiers.hpp"
#include "winpred/errors.hpp"

namespace winpred {

namespace {

enum Stream : std::uint64_t {
    kHeroStream = 1,
    kPlayerStream,
    kAffinityStream,
    kLineupStream,
    kWinnerStream,
    kDurationStream,
    kReplayStream,
    kHistoryStream,
    kPrivateStream,
    kReplayPresenceStream,
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Independent deterministic generator per (stream, index); generation order
// never affects the sampled values.
std::mt19937_64 rng_for(std::uint64_t seed, Stream stream, std::uint64_t index) {
    return std::mt19937_64(mix(mix(seed, stream), index));
}

std::string account_name(int player) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%06d", player);
    return buf;
}

struct Latents {
    std::vector<double> hero_strength;   // index hero_id - 1
    std::vector<double> player_skill;    // index player
    std::vector<double> player_mmr;
    std::vector<double> player_percentile;
    std::vector<bool> player_private;
};

}  // namespace

std::pair<Dataset, GroundTruth> generate_dataset(const SynthConfig& cfg) {
    if (cfg.hero_count < 10) throw DataError("hero_count must be at least 10");
    if (cfg.player_count < 10) throw DataError("player_count must be at least 10");
    if (cfg.attribute_count < 1) throw DataError("attribute_count must be at least 1");
    if (cfg.replay_fraction < 0.0 || cfg.replay_fraction > 1.0) {
        throw DataError("replay_fraction must be in [0,1]");
    }

    Dataset data;
    GroundTruth truth;

    // Hero catalog; the first attribute carries the latent strength so prior
    // models can recover it, the rest are noise traits.
    Latents latents;
    latents.hero_strength.resize(static_cast<std::size_t>(cfg.hero_count));
    data.catalog.hero_count = cfg.hero_count;
    data.catalog.attribute_names.push_back("strength");
    for (int a = 1; a < cfg.attribute_count; ++a) {
        data.catalog.attribute_names.push_back("trait_" + std::to_string(a));
    }
    for (int h = 0; h < cfg.hero_count; ++h) {
        auto rng = rng_for(cfg.seed, kHeroStream, static_cast<std::uint64_t>(h));
        std::normal_distribution<double> normal(0.0, 1.0);
        latents.hero_strength[static_cast<std::size_t>(h)] = normal(rng);
        std::vector<double> attrs(static_cast<std::size_t>(cfg.attribute_count));
        attrs[0] = latents.hero_strength[static_cast<std::size_t>(h)];
        for (int a = 1; a < cfg.attribute_count; ++a) {
            attrs[static_cast<std::size_t>(a)] = normal(rng);
        }
        data.catalog.attributes.push_back(std::move(attrs));
    }

    latents.player_skill.resize(static_cast<std::size_t>(cfg.player_count));
    latents.player_mmr.resize(static_cast<std::size_t>(cfg.player_count));
    latents.player_private.resize(static_cast<std::size_t>(cfg.player_count));
    for (int p = 0; p < cfg.player_count; ++p) {
        auto rng = rng_for(cfg.seed, kPlayerStream, static_cast<std::uint64_t>(p));
        std::normal_distribution<double> normal(0.0, 1.0);
        latents.player_skill[static_cast<std::size_t>(p)] = normal(rng);
        latents.player_mmr[static_cast<std::size_t>(p)] =
            3500.0 + 900.0 * latents.player_skill[static_cast<std::size_t>(p)];
        auto private_rng = rng_for(cfg.seed, kPrivateStream, static_cast<std::uint64_t>(p));
        latents.player_private[static_cast<std::size_t>(p)] =
            std::uniform_real_distribution<double>(0.0, 1.0)(private_rng) <
            cfg.missing_profile_rate;
    }
    // Empirical MMR percentile over the whole player population.
    {
        std::vector<int> order(static_cast<std::size_t>(cfg.player_count));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return latents.player_mmr[static_cast<std::size_t>(a)] <
                   latents.player_mmr[static_cast<std::size_t>(b)];
        });
        latents.player_percentile.resize(static_cast<std::size_t>(cfg.player_count));
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            latents.player_percentile[static_cast<std::size_t>(order[rank])] =
                cfg.player_count > 1
                    ? static_cast<double>(rank) / static_cast<double>(cfg.player_count - 1)
                    : 0.5;
        }
    }

    std::unordered_map<std::uint64_t, double> affinity_cache;
    auto affinity = [&](int player, int hero_id) {
        const std::uint64_t key = static_cast<std::uint64_t>(player) *
                                      static_cast<std::uint64_t>(cfg.hero_count + 1) +
                                  static_cast<std::uint64_t>(hero_id);
        auto it = affinity_cache.find(key);
        if (it != affinity_cache.end()) return it->second;
        auto rng = rng_for(cfg.seed, kAffinityStream, key);
        const double value = std::normal_distribution<double>(0.0, 1.0)(rng);
        affinity_cache.emplace(key, value);
        return value;
    };

    // Matches: lineups, latent strength difference, sampled winner, duration.
    std::unordered_map<std::uint64_t, bool> pair_seen;
    std::vector<std::pair<int, int>> history_pairs;  // (player, hero_id)
    auto want_history = [&](int player, int hero_id) {
        const std::uint64_t key = static_cast<std::uint64_t>(player) *
                                      static_cast<std::uint64_t>(cfg.hero_count + 1) +
                                  static_cast<std::uint64_t>(hero_id);
        if (pair_seen.emplace(key, true).second) history_pairs.emplace_back(player, hero_id);
    };

    for (std::size_t i = 0; i < cfg.n_matches; ++i) {
        auto rng = rng_for(cfg.seed, kLineupStream, i);
        std::uniform_int_distribution<int> hero_dist(1, cfg.hero_count);
        std::uniform_int_distribution<int> player_dist(0, cfg.player_count - 1);

        std::vector<int> heroes;
        while (heroes.size() < 10) {
            const int h = hero_dist(rng);
            if (std::find(heroes.begin(), heroes.end(), h) == heroes.end()) {
                heroes.push_back(h);
            }
        }
        // Matches with more than two private players would be dropped at
        // ingest, so redraw those lineups.
        std::vector<int> players;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            players.clear();
            int missing = 0;
            while (players.size() < 10) {
                const int p = player_dist(rng);
                if (std::find(players.begin(), players.end(), p) == players.end()) {
                    players.push_back(p);
                }
            }
            for (int p : players) {
                if (latents.player_private[static_cast<std::size_t>(p)]) ++missing;
            }
            if (missing <= 2) break;
        }

        double strength = 0.0;
        for (int s = 0; s < 10; ++s) {
            const double sign = s < 5 ? 1.0 : -1.0;
            const int hero = heroes[static_cast<std::size_t>(s)];
            const int player = players[static_cast<std::size_t>(s)];
            strength += sign * cfg.hero_strength_scale *
                        latents.hero_strength[static_cast<std::size_t>(hero - 1)];
            strength += sign * cfg.player_skill_scale *
                        latents.player_skill[static_cast<std::size_t>(player)];
            strength += sign * cfg.hero_player_affinity_scale * affinity(player, hero);
        }
        const double p_radiant = sigmoid(strength);

        auto winner_rng = rng_for(cfg.seed, kWinnerStream, i);
        const bool radiant_won =
            std::uniform_real_distribution<double>(0.0, 1.0)(winner_rng) < p_radiant;

        auto duration_rng = rng_for(cfg.seed, kDurationStream, i);
        const double raw_duration = std::normal_distribution<double>(
            cfg.duration_mean, cfg.duration_sd)(duration_rng);
        const int duration = std::clamp(static_cast<int>(std::lround(raw_duration)),
                                        cfg.min_duration, cfg.max_duration);

        MatchRecord m;
        m.match_id = "synth" + std::to_string(i);
        m.winner = radiant_won ? TeamSide::Radiant : TeamSide::Dire;
        m.duration_min = duration;
        for (int s = 0; s < 10; ++s) {
            PlayerSlot slot;
            slot.account_id = account_name(players[static_cast<std::size_t>(s)]);
            slot.hero_id = heroes[static_cast<std::size_t>(s)];
            slot.side = s < 5 ? TeamSide::Radiant : TeamSide::Dire;
            m.slots.push_back(slot);
            want_history(players[static_cast<std::size_t>(s)], heroes[static_cast<std::size_t>(s)]);
        }
        canonicalize_slots(m.slots);
        for (std::size_t s = 0; s < m.slots.size(); ++s) {
            m.slots[s].source_slot = static_cast<int>(s);
        }

        truth.matches.emplace(m.match_id,
                              GroundTruth::MatchTruth{strength, p_radiant, radiant_won});
        data.matches.push_back(std::move(m));
    }

    // A few extra pool heroes per player so profiles also cover heroes the
    // player never picks in this dataset.
    for (int p = 0; p < cfg.player_count; ++p) {
        auto rng = rng_for(cfg.seed, kHistoryStream, 0x10000000ULL + static_cast<std::uint64_t>(p));
        std::uniform_int_distribution<int> hero_dist(1, cfg.hero_count);
        for (int k = 0; k < 3; ++k) want_history(p, hero_dist(rng));
    }

    // Player profiles with per-hero histories simulated from background
    // games, so the observable statistics are noisy estimates of the latents.
    for (int p = 0; p < cfg.player_count; ++p) {
        if (latents.player_private[static_cast<std::size_t>(p)]) continue;
        PlayerProfile profile;
        profile.account_id = account_name(p);
        profile.mmr = latents.player_mmr[static_cast<std::size_t>(p)];
        profile.mmr_percentile = latents.player_percentile[static_cast<std::size_t>(p)];
        data.profiles.emplace(profile.account_id, std::move(profile));
    }
    for (const auto& [player, hero_id] : history_pairs) {
        if (latents.player_private[static_cast<std::size_t>(player)]) continue;
        const std::uint64_t key = static_cast<std::uint64_t>(player) *
                                      static_cast<std::uint64_t>(cfg.hero_count + 1) +
                                  static_cast<std::uint64_t>(hero_id);
        auto rng = rng_for(cfg.seed, kHistoryStream, key);
        std::normal_distribution<double> normal(0.0, 1.0);
        const double ability =
            latents.player_skill[static_cast<std::size_t>(player)] + affinity(player, hero_id);

        HeroHistory h;
        const int n_games = 8 + std::poisson_distribution<int>(18)(rng);
        const double game_win_prob = sigmoid(0.7 * ability);
        const int wins = std::binomial_distribution<int>(n_games, game_win_prob)(rng);
        h.winrate = static_cast<double>(wins) / n_games;
        h.xpm = 430.0 + 110.0 * ability + 18.0 * normal(rng);
        h.gpm = 380.0 + 95.0 * ability + 16.0 * normal(rng);
        h.deaths_pm = std::max(0.02, 0.28 - 0.05 * ability + 0.02 * normal(rng));
        h.kills_pm = std::max(0.0, 0.22 + 0.045 * ability + 0.02 * normal(rng));
        h.assists_pm = std::max(0.0, 0.35 + 0.04 * ability + 0.025 * normal(rng));
        h.lasthits_pm = std::max(0.0, 5.2 + 0.9 * ability + 0.3 * normal(rng));
        h.games_played = n_games;
        data.profiles.at(account_name(player)).per_hero.emplace(hero_id, h);
    }

    // Replays: cumulative per-player series whose team-mean difference drifts
    // toward the sampled winner minute by minute.
    for (std::size_t i = 0; i < cfg.n_matches; ++i) {
        auto presence_rng = rng_for(cfg.seed, kReplayPresenceStream, i);
        if (std::uniform_real_distribution<double>(0.0, 1.0)(presence_rng) >=
            cfg.replay_fraction) {
            continue;
        }
        MatchRecord& m = data.matches[i];
        m.has_replay = true;

        auto rng = rng_for(cfg.seed, kReplayStream, i);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);

        ReplaySeries r;
        r.match_id = m.match_id;
        r.minutes = m.duration_min;
        r.players.resize(10);
        const double win_sign = m.radiant_won() ? 1.0 : -1.0;
        for (std::size_t s = 0; s < 10; ++s) {
            auto& series = r.players[s];
            const double team_sign = m.slots[s].side == TeamSide::Radiant ? 1.0 : -1.0;
            double gold = 0.0;
            double xp = 0.0;
            double deaths = 0.0;
            series.gold.push_back(gold);
            series.xp.push_back(xp);
            series.deaths.push_back(deaths);
            for (int minute = 1; minute <= m.duration_min; ++minute) {
                const double flip = (cfg.drift_flip_minute > 0 &&
                                     minute >= cfg.drift_flip_minute)
                                        ? -1.0
                                        : 1.0;
                const double signal =
                    0.5 * team_sign * win_sign * cfg.realtime_drift_scale * flip;
                gold += std::max(0.0, 400.0 + signal + cfg.realtime_noise_scale * normal(rng));
                xp += std::max(0.0, 480.0 + 1.2 * signal +
                                        cfg.realtime_noise_scale * normal(rng));
                const double p_death =
                    std::clamp(0.20 - 0.002 * team_sign * win_sign *
                                          cfg.realtime_drift_scale * flip,
                               0.01, 0.95);
                if (uniform(rng) < p_death) deaths += 1.0;
                series.gold.push_back(gold);
                series.xp.push_back(xp);
                series.deaths.push_back(deaths);
            }
        }
        data.replays.emplace(m.match_id, std::move(r));
    }

    return {std::move(data), std::move(truth)};
}

double bayes_accuracy(const GroundTruth& gt) {
    if (gt.matches.empty()) return 0.5;
    double sum = 0.0;
    for (const auto& [_, truth] : gt.matches) {
        sum += std::max(truth.p_radiant, 1.0 - truth.p_radiant);
    }
    return sum / static_cast<double>(gt.matches.size());
}

}  // namespace winpred
