#include "winpred/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "winpred/errors.hpp"

namespace winpred {

void canonicalize_slots(std::vector<PlayerSlot>& slots) {
    std::stable_sort(slots.begin(), slots.end(),
                     [](const PlayerSlot& a, const PlayerSlot& b) {
                         if (a.side != b.side) return a.side == TeamSide::Radiant;
                         if (a.account_id.has_value() != b.account_id.has_value())
                             return a.account_id.has_value();
                         if (a.account_id && b.account_id)
                             return *a.account_id < *b.account_id;
                         return false;
                     });
}

ValidationResult validate_match(const MatchRecord& m, const HeroCatalog& catalog) {
    ValidationResult result;
    int radiant = 0;
    int dire = 0;
    for (const auto& slot : m.slots) {
        (slot.side == TeamSide::Radiant ? radiant : dire)++;
    }
    if (m.slots.size() != 10 || radiant != 5 || dire != 5) {
        result.violations.push_back("slot count: expected 5 radiant + 5 dire, got " +
                                    std::to_string(radiant) + "+" + std::to_string(dire));
    }
    std::unordered_set<int> seen;
    for (const auto& slot : m.slots) {
        if (slot.hero_id < 1 || slot.hero_id > catalog.hero_count) {
            result.violations.push_back("bad hero_id " + std::to_string(slot.hero_id));
        } else if (!seen.insert(slot.hero_id).second) {
            result.violations.push_back("duplicate hero " + std::to_string(slot.hero_id));
        }
    }
    if (m.duration_min < 1) {
        result.violations.push_back("nonpositive duration " + std::to_string(m.duration_min));
    }
    return result;
}

ValidationResult validate_replay(const ReplaySeries& r) {
    ValidationResult result;
    if (r.players.size() != 10) {
        result.violations.push_back("replay slot count " + std::to_string(r.players.size()));
        return result;
    }
    const std::size_t expected = static_cast<std::size_t>(r.minutes) + 1;
    for (std::size_t s = 0; s < r.players.size(); ++s) {
        const auto& p = r.players[s];
        for (const auto* series : {&p.gold, &p.xp, &p.deaths}) {
            if (series->size() != expected) {
                result.violations.push_back("slot " + std::to_string(s) +
                                            ": series length " + std::to_string(series->size()) +
                                            " != " + std::to_string(expected));
                return result;
            }
            for (std::size_t t = 1; t < series->size(); ++t) {
                if ((*series)[t] < (*series)[t - 1]) {
                    result.violations.push_back("slot " + std::to_string(s) +
                                                ": decreasing cumulative series at minute " +
                                                std::to_string(t));
                    return result;
                }
            }
        }
    }
    return result;
}

ValidationResult validate_catalog(const HeroCatalog& c) {
    ValidationResult result;
    if (c.hero_count < 1) {
        result.violations.push_back("hero_count must be positive");
        return result;
    }
    if (c.attributes.size() != static_cast<std::size_t>(c.hero_count)) {
        result.violations.push_back("attribute rows " + std::to_string(c.attributes.size()) +
                                    " != hero_count " + std::to_string(c.hero_count));
        return result;
    }
    for (int h = 0; h < c.hero_count; ++h) {
        if (c.attributes[h].size() != c.attribute_names.size()) {
            result.violations.push_back("hero " + std::to_string(h + 1) +
                                        " has wrong attribute count");
        }
    }
    return result;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double test_fraction,
                                          std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw DataError("test_fraction must be in (0,1)");
    }
    const std::size_t n = d.matches.size();
    // Small backoff keeps exact products like 0.1*100 from rounding up.
    const std::size_t n_test =
        static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n) - 1e-9));
    if (n_test == 0 || n_test >= n) {
        throw DataError("split would leave an empty side: n=" + std::to_string(n) +
                        " test_fraction=" + std::to_string(test_fraction));
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<std::size_t> test_idx(idx.begin(), idx.begin() + static_cast<long>(n_test));
    std::vector<std::size_t> train_idx(idx.begin() + static_cast<long>(n_test), idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    auto take = [&d](const std::vector<std::size_t>& which) {
        Dataset out;
        out.catalog = d.catalog;
        out.profiles = d.profiles;
        out.matches.reserve(which.size());
        for (std::size_t i : which) {
            out.matches.push_back(d.matches[i]);
            auto it = d.replays.find(d.matches[i].match_id);
            if (it != d.replays.end()) out.replays.emplace(it->first, it->second);
        }
        return out;
    };
    return {take(train_idx), take(test_idx)};
}

}  // namespace winpred
