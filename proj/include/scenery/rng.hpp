#pragma once

#include <array>
#include <cstdint>

namespace scenery {

// Philox4x64-10 block function (Salmon et al.), keyed by two words.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Counter-based random stream. The key is (master_seed, stream_id) and the
// counter walks forward one Philox block (four words) at a time, so two streams
// with the same pair reproduce the same sequence and distinct pairs are
// independent Philox key schedules.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
        : key_{master_seed, stream_id} {}

    std::uint64_t master_seed() const noexcept { return key_[0]; }
    std::uint64_t stream_id() const noexcept { return key_[1]; }
    // Number of 64-bit words consumed so far.
    std::uint64_t position() const noexcept { return block_ * 4 + buffer_pos_ - 4; }

    std::uint64_t next_u64() noexcept {
        if (buffer_pos_ == 4) refill();
        return buffer_[buffer_pos_++];
    }

    // Low k bits of a reservoir word, 1 <= k <= 32.
    std::uint32_t bits(unsigned k) noexcept {
        if (reservoir_bits_ < k) {
            reservoir_ = next_u64();
            reservoir_bits_ = 64;
        }
        auto out = static_cast<std::uint32_t>(reservoir_ & ((std::uint64_t{1} << k) - 1));
        reservoir_ >>= k;
        reservoir_bits_ -= k;
        return out;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    // Uniform on (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }
    // Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t bound) noexcept;

    double normal() noexcept;
    double exponential() noexcept;

    // Child stream for sub-task `index`; depends only on the parent's key.
    RngStream split(std::uint64_t index) const noexcept;

private:
    void refill() noexcept;

    std::array<std::uint64_t, 2> key_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buffer_{};
    unsigned buffer_pos_ = 4;
    std::uint64_t reservoir_ = 0;
    unsigned reservoir_bits_ = 0;
};

}  // namespace scenery
