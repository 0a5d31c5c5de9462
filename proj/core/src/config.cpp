#include "countersign/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "countersign/primitives.hpp"

namespace csign {
namespace {

using nlohmann::json;  // std::map-backed: keys serialize sorted, canonical

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xf]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(const std::string& text) {
    if (text.size() % 2 != 0) throw std::invalid_argument("hex string with odd length");
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw std::invalid_argument("bad hex digit");
    };
    std::vector<std::uint8_t> out(text.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nibble(text[2 * i]) << 4) | nibble(text[2 * i + 1]));
    }
    return out;
}

json cache_to_json(const CacheConfig& c) {
    return json{{"sets", c.sets}, {"ways", c.ways}, {"line_bytes", c.line_bytes}};
}

CacheConfig cache_from_json(const json& j) {
    return CacheConfig{j.at("sets"), j.at("ways"), j.at("line_bytes")};
}

json offline_fields(const PipelineConfig& c) {
    json j;
    j["scheme"] = to_string(c.scheme);
    j["vpmu"] = {{"l1i", cache_to_json(c.vpmu.l1i)},
                 {"l1d", cache_to_json(c.vpmu.l1d)},
                 {"l2", cache_to_json(c.vpmu.l2)},
                 {"probe_cost", c.vpmu.probe_cost},
                 {"l1_miss_penalty", c.vpmu.l1_miss_penalty},
                 {"l2_miss_penalty", c.vpmu.l2_miss_penalty},
                 {"mispredict_penalty", c.vpmu.mispredict_penalty}};
    json inputs = json::array();
    for (const auto& input : c.fuzz.initial_inputs) inputs.push_back(to_hex(input));
    j["fuzz"] = {{"budget_execs", c.fuzz.budget_execs},
                 {"rng_seed", c.fuzz.rng_seed},
                 {"initial_inputs", inputs}};
    j["sampling"] = {{"t_m", c.sampling.t_m}, {"t_s", c.sampling.t_s}};
    j["features"] = {{"t_len", c.features.t_len},
                     {"t_shift", c.features.t_shift},
                     {"z", c.features.z},
                     {"selection_method", to_string(c.features.selection_method)}};
    j["detector"] = {{"gamma_grid", c.detector.gamma_grid},
                     {"nu_grid", c.detector.nu_grid},
                     {"t_ts", c.detector.t_ts},
                     {"t_pc", c.detector.t_pc}};
    return j;
}

}  // namespace

std::string PipelineConfig::to_json() const {
    json j = offline_fields(*this);
    j["variant"] = to_string(variant);
    j["paths"] = {{"corpus_dir", paths.corpus_dir},
                  {"model_file", paths.model_file},
                  {"report_file", paths.report_file}};
    json schemes = json::array();
    for (SchemeId s : matrix.schemes) schemes.push_back(to_string(s));
    json variants = json::array();
    for (SubversionVariant v : matrix.variants) variants.push_back(to_string(v));
    j["matrix"] = {{"schemes", schemes},
                   {"variants", variants},
                   {"t_ts_grid", matrix.t_ts_grid},
                   {"t_pc_grid", matrix.t_pc_grid}};
    return j.dump(2) + "\n";
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    PipelineConfig c;
    c.scheme = scheme_from_string(j.at("scheme"));
    if (j.contains("variant")) c.variant = variant_from_string(j.at("variant"));

    const json& v = j.at("vpmu");
    c.vpmu.l1i = cache_from_json(v.at("l1i"));
    c.vpmu.l1d = cache_from_json(v.at("l1d"));
    c.vpmu.l2 = cache_from_json(v.at("l2"));
    c.vpmu.probe_cost = v.at("probe_cost");
    c.vpmu.l1_miss_penalty = v.at("l1_miss_penalty");
    c.vpmu.l2_miss_penalty = v.at("l2_miss_penalty");
    c.vpmu.mispredict_penalty = v.at("mispredict_penalty");

    const json& f = j.at("fuzz");
    c.fuzz.budget_execs = f.at("budget_execs");
    c.fuzz.rng_seed = f.at("rng_seed");
    c.fuzz.initial_inputs.clear();
    for (const auto& hex : f.at("initial_inputs")) {
        c.fuzz.initial_inputs.push_back(from_hex(hex.get<std::string>()));
    }

    c.sampling.t_m = j.at("sampling").at("t_m");
    c.sampling.t_s = j.at("sampling").at("t_s");

    const json& feat = j.at("features");
    c.features.t_len = feat.at("t_len");
    c.features.t_shift = feat.at("t_shift");
    c.features.z = feat.at("z");
    c.features.selection_method = selection_method_from_string(feat.at("selection_method"));

    const json& d = j.at("detector");
    c.detector.gamma_grid = d.at("gamma_grid").get<std::vector<double>>();
    c.detector.nu_grid = d.at("nu_grid").get<std::vector<double>>();
    c.detector.t_ts = d.at("t_ts");
    c.detector.t_pc = d.at("t_pc");

    if (j.contains("paths")) {
        c.paths.corpus_dir = j.at("paths").value("corpus_dir", c.paths.corpus_dir);
        c.paths.model_file = j.at("paths").value("model_file", c.paths.model_file);
        c.paths.report_file = j.at("paths").value("report_file", c.paths.report_file);
    }
    if (j.contains("matrix")) {
        const json& m = j.at("matrix");
        c.matrix.schemes.clear();
        for (const auto& s : m.at("schemes")) c.matrix.schemes.push_back(scheme_from_string(s));
        c.matrix.variants.clear();
        for (const auto& s : m.at("variants")) {
            c.matrix.variants.push_back(variant_from_string(s));
        }
        c.matrix.t_ts_grid = m.at("t_ts_grid").get<std::vector<std::uint32_t>>();
        c.matrix.t_pc_grid = m.at("t_pc_grid").get<std::vector<std::uint32_t>>();
    }
    return c;
}

std::string PipelineConfig::digest() const {
    const std::string canonical = offline_fields(*this).dump();
    return hex_digest(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(canonical.data()), canonical.size()));
}

PipelineConfig default_config(SchemeId scheme) {
    PipelineConfig c;
    c.scheme = scheme;
    switch (scheme) {
        case SchemeId::LATTICE:
            c.sampling = {13'500'000, 150};
            break;
        case SchemeId::HASHTREE:
            c.sampling = {7'200'000, 80};
            break;
        case SchemeId::UOV:
            c.sampling = {3'600'000, 40};
            break;
    }
    // Four fixed starting points: a zero block, a text-like pattern, a
    // 0xff block, and a longer mixed buffer.
    c.fuzz.initial_inputs = {
        std::vector<std::uint8_t>(48, 0x00),
        {},
        std::vector<std::uint8_t>(64, 0xff),
        {},
    };
    for (int i = 0; i < 72; ++i) {
        c.fuzz.initial_inputs[1].push_back(static_cast<std::uint8_t>('a' + i % 26));
    }
    for (int i = 0; i < 160; ++i) {
        c.fuzz.initial_inputs[3].push_back(static_cast<std::uint8_t>(i * 37));
    }
    return c;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) {
        std::filesystem::create_directories(target.parent_path());
    }
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    std::filesystem::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace csign
