#include "countersign/model_io.hpp"

#include <json.hpp>

#include "countersign/primitives.hpp"

namespace csign {
namespace {

using nlohmann::json;

json selection_to_json(const CounterSelection& s) {
    json chosen = json::array();
    for (EventKind kind : s.chosen) chosen.push_back(kEventNames[event_index(kind)]);
    json scores = json::array();
    for (double v : s.scores) scores.push_back(v);
    return json{{"method", to_string(s.method)}, {"chosen", chosen}, {"scores", scores}};
}

CounterSelection selection_from_json(const json& j) {
    CounterSelection s;
    s.method = selection_method_from_string(j.at("method"));
    for (const auto& name : j.at("chosen")) {
        for (std::size_t e = 0; e < kEventCount; ++e) {
            if (kEventNames[e] == name.get<std::string>()) {
                s.chosen.push_back(static_cast<EventKind>(e));
            }
        }
    }
    const auto scores = j.at("scores").get<std::vector<double>>();
    for (std::size_t i = 0; i < scores.size() && i < kEventCount; ++i) s.scores[i] = scores[i];
    return s;
}

json stats_to_json(const StandardizationStats& s) {
    json per_cp_mean = json::object();
    json per_cp_std = json::object();
    for (const auto& [cp, mean] : s.checkpoint_mean) per_cp_mean[std::to_string(cp)] = mean;
    for (const auto& [cp, dev] : s.checkpoint_stddev) per_cp_std[std::to_string(cp)] = dev;
    return json{{"mean", s.mean},
                {"stddev", s.stddev},
                {"checkpoint_mean", per_cp_mean},
                {"checkpoint_stddev", per_cp_std}};
}

StandardizationStats stats_from_json(const json& j) {
    StandardizationStats s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.stddev = j.at("stddev").get<std::vector<double>>();
    for (const auto& [key, value] : j.at("checkpoint_mean").items()) {
        s.checkpoint_mean[static_cast<std::uint32_t>(std::stoul(key))] =
            value.get<std::vector<double>>();
    }
    for (const auto& [key, value] : j.at("checkpoint_stddev").items()) {
        s.checkpoint_stddev[static_cast<std::uint32_t>(std::stoul(key))] =
            value.get<std::vector<double>>();
    }
    return s;
}

json svm_to_json(const OneClassSvmModel& m) {
    return json{{"support_vectors", m.support_vectors},
                {"alphas", m.alphas},
                {"rho", m.rho},
                {"gamma", m.gamma},
                {"nu", m.nu},
                {"kkt_residual", m.kkt_residual},
                {"training_rows", m.training_rows},
                {"standardization", stats_to_json(m.standardization)},
                {"selection", selection_to_json(m.selection)}};
}

OneClassSvmModel svm_from_json(const json& j) {
    OneClassSvmModel m;
    m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.rho = j.at("rho");
    m.gamma = j.at("gamma");
    m.nu = j.at("nu");
    m.kkt_residual = j.at("kkt_residual");
    m.training_rows = j.at("training_rows");
    m.standardization = stats_from_json(j.at("standardization"));
    m.selection = selection_from_json(j.at("selection"));
    return m;
}

std::string bytes_to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (std::uint8_t b : bytes) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xf]);
    }
    return out;
}

std::vector<std::uint8_t> hex_to_bytes(const std::string& text) {
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        return static_cast<std::uint8_t>(c - 'a' + 10);
    };
    std::vector<std::uint8_t> out(text.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nibble(text[2 * i]) << 4) | nibble(text[2 * i + 1]));
    }
    return out;
}

}  // namespace

std::string ModelDocument::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["scheme"] = scheme;
    j["config_digest"] = config_digest;
    j["selection"] = selection_to_json(selection);
    j["ts_model"] = svm_to_json(ts_model);
    j["ts_model"]["signature_kind"] = "time_series";
    j["ts_holdout_accuracy"] = ts_holdout_accuracy;

    json members = json::array();
    for (const auto& member : pc_ensemble.members) members.push_back(svm_to_json(member));
    json columns = json::array();
    for (const auto& cols : pc_ensemble.member_columns) columns.push_back(cols);
    j["pc_ensemble"] = {{"signature_kind", "checkpoint"},
                        {"members", members},
                        {"member_columns", columns}};

    j["thresholds"] = {{"t_ts", t_ts}, {"t_pc", t_pc}};
    j["cv"] = {{"folds", cv.folds},
               {"fold_scores", cv.fold_scores},
               {"chosen_fold", cv.chosen_fold},
               {"chosen_seeds", cv.chosen_seeds},
               {"mean_accuracy", cv.mean_accuracy}};
    j["ts_input"] = bytes_to_hex(ts_input);

    json hits = json::object();
    for (const auto& [key, count] : expected_hits) {
        hits[std::to_string(key.first) + ":" + std::to_string(key.second)] = count;
    }
    j["expected_hits"] = hits;
    return j.dump(2) + "\n";
}

ModelDocument ModelDocument::from_json(const std::string& text) {
    const json j = json::parse(text);
    ModelDocument doc;
    doc.schema_version = j.at("schema_version");
    doc.scheme = j.at("scheme");
    doc.config_digest = j.at("config_digest");
    doc.selection = selection_from_json(j.at("selection"));
    doc.ts_model = svm_from_json(j.at("ts_model"));
    doc.ts_holdout_accuracy = j.at("ts_holdout_accuracy");

    const json& pc = j.at("pc_ensemble");
    for (const auto& member : pc.at("members")) {
        doc.pc_ensemble.members.push_back(svm_from_json(member));
    }
    doc.pc_ensemble.member_columns =
        pc.at("member_columns").get<std::vector<std::vector<std::size_t>>>();

    doc.t_ts = j.at("thresholds").at("t_ts");
    doc.t_pc = j.at("thresholds").at("t_pc");

    const json& cv = j.at("cv");
    doc.cv.folds = cv.at("folds").get<std::vector<std::vector<std::uint32_t>>>();
    doc.cv.fold_scores = cv.at("fold_scores").get<std::vector<double>>();
    doc.cv.chosen_fold = cv.at("chosen_fold");
    doc.cv.chosen_seeds = cv.at("chosen_seeds").get<std::vector<std::uint32_t>>();
    doc.cv.mean_accuracy = cv.at("mean_accuracy");

    doc.ts_input = hex_to_bytes(j.at("ts_input"));
    for (const auto& [key, value] : j.at("expected_hits").items()) {
        const auto colon = key.find(':');
        const std::uint32_t seed = static_cast<std::uint32_t>(std::stoul(key.substr(0, colon)));
        const std::uint32_t cp = static_cast<std::uint32_t>(std::stoul(key.substr(colon + 1)));
        doc.expected_hits[{seed, cp}] = value.get<std::uint32_t>();
    }
    return doc;
}

std::string ModelDocument::digest() const {
    const std::string serialized = to_json();
    return hex_digest(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(serialized.data()), serialized.size()));
}

}  // namespace csign
