#include "winpred/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "winpred/errors.hpp"

namespace winpred {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vec_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i];
    return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd mat_from_json(const json& j) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    return m;
}

json normalizer_to_json(const Normalizer& n) {
    json j;
    j["mean"] = vec_to_json(n.mean);
    j["sd"] = vec_to_json(n.sd);
    return j;
}

Normalizer normalizer_from_json(const json& j) {
    Normalizer n;
    n.mean = vec_from_json(j.at("mean"));
    n.sd = vec_from_json(j.at("sd"));
    return n;
}

json lr_to_json(const LinearModel& m) {
    json j;
    j["layout"] = m.layout_name;
    j["lambda"] = m.lambda;
    j["bias"] = m.bias;
    j["weights"] = vec_to_json(m.weights);
    j["normalizer"] = normalizer_to_json(m.norm);
    return j;
}

LinearModel lr_from_json(const json& j) {
    LinearModel m;
    m.layout_name = j.at("layout").get<std::string>();
    m.lambda = j.at("lambda").get<double>();
    m.bias = j.at("bias").get<double>();
    m.weights = vec_from_json(j.at("weights"));
    m.norm = normalizer_from_json(j.at("normalizer"));
    return m;
}

json mlp_to_json(const MLPModel& m) {
    json j;
    j["layout"] = m.layout_name;
    j["lambda"] = m.lambda;
    j["activation"] = to_string(m.activation);
    j["hidden_weights"] = mat_to_json(m.hidden_weights);
    j["hidden_bias"] = vec_to_json(m.hidden_bias);
    j["output_weights"] = vec_to_json(m.output_weights);
    j["output_bias"] = m.output_bias;
    j["normalizer"] = normalizer_to_json(m.norm);
    return j;
}

MLPModel mlp_from_json(const json& j) {
    MLPModel m;
    m.layout_name = j.at("layout").get<std::string>();
    m.lambda = j.at("lambda").get<double>();
    m.activation = activation_from_string(j.at("activation").get<std::string>());
    m.hidden_weights = mat_from_json(j.at("hidden_weights"));
    m.hidden_bias = vec_from_json(j.at("hidden_bias"));
    m.output_weights = vec_from_json(j.at("output_weights"));
    m.output_bias = j.at("output_bias").get<double>();
    m.norm = normalizer_from_json(j.at("normalizer"));
    return m;
}

json transitions_to_json(const TransitionModel& m) {
    json j;
    j["bins"] = m.bins;
    j["alpha"] = m.alpha;
    j["radiant_prior"] = m.radiant_prior;
    json edges;
    for (int c = 0; c < kChannels; ++c) {
        json channel = json::array();
        for (double e : m.edges.edges[static_cast<std::size_t>(c)]) channel.push_back(e);
        edges[kChannelNames[static_cast<std::size_t>(c)]] = std::move(channel);
    }
    j["edges"] = std::move(edges);
    json matrices;
    for (int c = 0; c < kChannels; ++c) {
        json channel;
        channel["loss"] = mat_to_json(m.trans[static_cast<std::size_t>(c)][0]);
        channel["win"] = mat_to_json(m.trans[static_cast<std::size_t>(c)][1]);
        matrices[kChannelNames[static_cast<std::size_t>(c)]] = std::move(channel);
    }
    j["matrices"] = std::move(matrices);
    return j;
}

TransitionModel transitions_from_json(const json& j) {
    TransitionModel m;
    m.bins = j.at("bins").get<int>();
    m.alpha = j.at("alpha").get<double>();
    m.radiant_prior = j.at("radiant_prior").get<double>();
    m.edges.bins = m.bins;
    for (int c = 0; c < kChannels; ++c) {
        m.edges.edges[static_cast<std::size_t>(c)] =
            j.at("edges").at(kChannelNames[static_cast<std::size_t>(c)])
                .get<std::vector<double>>();
        const auto& channel = j.at("matrices").at(kChannelNames[static_cast<std::size_t>(c)]);
        m.trans[static_cast<std::size_t>(c)][0] = mat_from_json(channel.at("loss"));
        m.trans[static_cast<std::size_t>(c)][1] = mat_from_json(channel.at("win"));
    }
    return m;
}

json features_to_json(const PriorFeaturePipeline& p) {
    json j;
    j["hero_count"] = p.layout.hero_count;
    j["attribute_count"] = p.layout.attribute_count;
    j["rival_symmetric"] = p.rivals.symmetric_complement;
    j["rival_default_rate"] = p.rivals.default_rate;
    // sorted for deterministic output
    std::vector<std::pair<std::uint64_t, RivalWinrateTable::Cell>> cells(
        p.rivals.cells.begin(), p.rivals.cells.end());
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    json jcells = json::array();
    for (const auto& [key, cell] : cells) {
        jcells.push_back({static_cast<std::uint64_t>(key >> 32),
                          static_cast<std::uint64_t>(key & 0xffffffffULL), cell.radiant_wins,
                          cell.games});
    }
    j["rival_cells"] = std::move(jcells);
    j["player_means"] = vec_to_json(p.imputation.player_means);
    j["hero_player_means"] = vec_to_json(p.imputation.hero_player_means);
    return j;
}

PriorFeaturePipeline features_from_json(const json& j) {
    PriorFeaturePipeline p;
    p.layout.hero_count = j.at("hero_count").get<int>();
    p.layout.attribute_count = j.at("attribute_count").get<int>();
    p.rivals.symmetric_complement = j.at("rival_symmetric").get<bool>();
    p.rivals.default_rate = j.at("rival_default_rate").get<double>();
    for (const auto& cell : j.at("rival_cells")) {
        const std::uint64_t key = (cell[0].get<std::uint64_t>() << 32) |
                                  cell[1].get<std::uint64_t>();
        p.rivals.cells[key] = {cell[2].get<std::int64_t>(), cell[3].get<std::int64_t>()};
    }
    p.imputation.player_means = vec_from_json(j.at("player_means"));
    p.imputation.hero_player_means = vec_from_json(j.at("hero_player_means"));
    return p;
}

json bank_to_json(const TimeBank& bank) {
    json j;
    j["min_windows"] = bank.min_windows;
    j["minutes"] = bank.minutes;
    json members;
    for (const auto& [minute, member] : bank.members) {
        members[std::to_string(minute)] = lr_to_json(member);
    }
    j["members"] = std::move(members);
    return j;
}

TimeBank bank_from_json(const json& j) {
    TimeBank bank;
    bank.min_windows = j.at("min_windows").get<std::size_t>();
    bank.minutes = j.at("minutes").get<std::vector<int>>();
    for (const auto& [key, member] : j.at("members").items()) {
        bank.members.emplace(std::stoi(key), lr_from_json(member));
    }
    return bank;
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = to_string(model.kind);
    j["feature_set"] = to_string(model.feature_set);
    if (model.kind != ModelKind::Asm) j["features"] = features_to_json(model.features);
    if (model.prior_lr) j["prior_lr"] = lr_to_json(*model.prior_lr);
    if (model.prior_mlp) j["prior_mlp"] = mlp_to_json(*model.prior_mlp);
    if (model.transitions) j["transitions"] = transitions_to_json(*model.transitions);
    if (model.concat_lr) j["concat_lr"] = lr_to_json(*model.concat_lr);
    if (model.stacker) j["stacker"] = lr_to_json(*model.stacker);
    if (model.bank) j["bank"] = bank_to_json(*model.bank);

    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out << j.dump(1) << "\n";
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion) {
            throw DataError(path.string() + ": unsupported model format version");
        }
        TrainedModel model;
        model.kind = model_kind_from_string(j.at("kind").get<std::string>());
        model.feature_set = feature_set_from_string(j.at("feature_set").get<std::string>());
        if (j.contains("features")) model.features = features_from_json(j.at("features"));
        if (j.contains("prior_lr")) model.prior_lr = lr_from_json(j.at("prior_lr"));
        if (j.contains("prior_mlp")) model.prior_mlp = mlp_from_json(j.at("prior_mlp"));
        if (j.contains("transitions")) {
            model.transitions = transitions_from_json(j.at("transitions"));
        }
        if (j.contains("concat_lr")) model.concat_lr = lr_from_json(j.at("concat_lr"));
        if (j.contains("stacker")) model.stacker = lr_from_json(j.at("stacker"));
        if (j.contains("bank")) model.bank = bank_from_json(j.at("bank"));
        return model;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace winpred
