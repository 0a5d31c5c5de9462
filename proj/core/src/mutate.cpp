#include "countersign/mutate.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace csign {
namespace {

void flip_bit(std::vector<std::uint8_t>& data, Rng& rng) {
    const std::size_t bit = rng.bounded(data.size() * 8);
    data[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
}

template <typename T>
void bounded_arith(std::vector<std::uint8_t>& data, Rng& rng) {
    if (data.size() < sizeof(T)) {
        flip_bit(data, rng);
        return;
    }
    const std::size_t pos = rng.bounded(data.size() - sizeof(T) + 1);
    T value;
    std::memcpy(&value, data.data() + pos, sizeof(T));
    const std::int32_t delta = 1 + static_cast<std::int32_t>(rng.bounded(35));
    value = rng.chance(0.5) ? static_cast<T>(value + static_cast<T>(delta))
                            : static_cast<T>(value - static_cast<T>(delta));
    std::memcpy(data.data() + pos, &value, sizeof(T));
}

template <typename T>
void interesting_splice(std::vector<std::uint8_t>& data, Rng& rng) {
    if (data.size() < sizeof(T)) {
        flip_bit(data, rng);
        return;
    }
    static constexpr std::int64_t kInteresting[] = {0, 1, -1,
                                                    std::numeric_limits<T>::max()};
    const std::size_t pos = rng.bounded(data.size() - sizeof(T) + 1);
    const T value = static_cast<T>(kInteresting[rng.bounded(4)]);
    std::memcpy(data.data() + pos, &value, sizeof(T));
}

}  // namespace

std::vector<std::uint8_t> mutate(std::span<const std::uint8_t> input, Rng& rng,
                                 std::span<const std::vector<std::uint8_t>> splice_pool) {
    if (input.empty()) throw std::invalid_argument("mutate: input must be non-empty");
    std::vector<std::uint8_t> out(input.begin(), input.end());

    switch (rng.bounded(9)) {
        case 0:
            flip_bit(out, rng);
            break;
        case 1:  // byte set
            out[rng.bounded(out.size())] = rng.byte();
            break;
        case 2:
            bounded_arith<std::uint8_t>(out, rng);
            break;
        case 3:
            bounded_arith<std::uint16_t>(out, rng);
            break;
        case 4:
            bounded_arith<std::uint32_t>(out, rng);
            break;
        case 5:
            switch (rng.bounded(3)) {
                case 0: interesting_splice<std::uint8_t>(out, rng); break;
                case 1: interesting_splice<std::uint16_t>(out, rng); break;
                default: interesting_splice<std::uint32_t>(out, rng); break;
            }
            break;
        case 6: {  // block duplicate
            const std::size_t len = 1 + rng.bounded(std::min<std::size_t>(out.size(), 64));
            const std::size_t src = rng.bounded(out.size() - len + 1);
            const std::size_t dst = rng.bounded(out.size() + 1);
            std::vector<std::uint8_t> block(out.begin() + src, out.begin() + src + len);
            out.insert(out.begin() + dst, block.begin(), block.end());
            if (out.size() > kMaxInputLen) out.resize(kMaxInputLen);
            break;
        }
        case 7: {  // block delete; floor rule keeps length >= 1
            if (out.size() == 1) {
                flip_bit(out, rng);
                break;
            }
            const std::size_t len = 1 + rng.bounded(std::min<std::size_t>(out.size() - 1, 64));
            const std::size_t src = rng.bounded(out.size() - len + 1);
            out.erase(out.begin() + src, out.begin() + src + len);
            break;
        }
        default: {  // 2-input splice
            if (splice_pool.empty()) {
                flip_bit(out, rng);
                break;
            }
            const auto& other = splice_pool[rng.bounded(splice_pool.size())];
            if (other.empty()) {
                flip_bit(out, rng);
                break;
            }
            const std::size_t cut_a = rng.bounded(out.size() + 1);
            const std::size_t cut_b = rng.bounded(other.size());
            out.resize(cut_a);
            out.insert(out.end(), other.begin() + cut_b, other.end());
            if (out.empty()) out.push_back(rng.byte());
            if (out.size() > kMaxInputLen) out.resize(kMaxInputLen);
            break;
        }
    }
    return out;
}

}  // namespace csign
