#include "countersign/signatures.hpp"

#include <istream>
#include <sstream>
#include <stdexcept>

namespace csign {
namespace {

void append_counter_header(std::string& out) {
    for (const auto& name : kEventNames) {
        out += ',';
        out += name;
    }
    out += '\n';
}

std::vector<std::uint64_t> parse_u64_line(const std::string& line) {
    std::vector<std::uint64_t> values;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        values.push_back(std::stoull(field));
    }
    return values;
}

}  // namespace

std::string to_csv(const TimeSeriesSignature& sig) {
    std::string out = "sample_idx";
    append_counter_header(out);
    for (std::size_t i = 0; i < sig.rows.size(); ++i) {
        out += std::to_string(i);
        for (std::uint64_t v : sig.rows[i]) {
            out += ',';
            out += std::to_string(v);
        }
        out += '\n';
    }
    return out;
}

std::string to_csv(const CheckpointSignature& sig) {
    std::string out = "seed_id,checkpoint_id,hit_idx";
    append_counter_header(out);
    for (const auto& row : sig.rows) {
        out += std::to_string(row.seed_id);
        out += ',';
        out += std::to_string(row.checkpoint_id);
        out += ',';
        out += std::to_string(row.hit_idx);
        for (std::uint64_t v : row.delta) {
            out += ',';
            out += std::to_string(v);
        }
        out += '\n';
    }
    return out;
}

TimeSeriesSignature time_series_from_csv(std::istream& in, std::uint64_t t_s,
                                         std::uint64_t t_m) {
    TimeSeriesSignature sig;
    sig.t_s = t_s;
    sig.t_m = t_m;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty time-series CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto values = parse_u64_line(line);
        if (values.size() != kEventCount + 1) {
            throw std::runtime_error("malformed time-series CSV row");
        }
        std::array<std::uint64_t, kEventCount> row{};
        for (std::size_t i = 0; i < kEventCount; ++i) row[i] = values[i + 1];
        sig.rows.push_back(row);
    }
    return sig;
}

CheckpointSignature checkpoint_from_csv(std::istream& in) {
    CheckpointSignature sig;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty checkpoint CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto values = parse_u64_line(line);
        if (values.size() != kEventCount + 3) {
            throw std::runtime_error("malformed checkpoint CSV row");
        }
        CheckpointRow row;
        row.seed_id = static_cast<std::uint32_t>(values[0]);
        row.checkpoint_id = static_cast<std::uint32_t>(values[1]);
        row.hit_idx = static_cast<std::uint32_t>(values[2]);
        for (std::size_t i = 0; i < kEventCount; ++i) row.delta[i] = values[i + 3];
        sig.rows.push_back(row);
    }
    return sig;
}

}  // namespace csign
