#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "wban/aes128.hpp"
#include "wban/bytes.hpp"

namespace wban {

/// Source of uniform random octets. Protocol and attack code takes one of
/// these by reference so every run is reproducible from a seed.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    Bytes16 nonce128() {
        Bytes16 n{};
        fill(n);
        return n;
    }

    Bytes32 bytes256() {
        Bytes32 b{};
        fill(b);
        return b;
    }
};

/// Counter-mode deterministic generator: AES-128 over an incrementing block
/// counter, keyed from a 64-bit seed. Identical seeds give identical streams.
class CtrRandomSource final : public RandomSource {
public:
    explicit CtrRandomSource(std::uint64_t seed) : cipher_(derive_key(seed)) {}

    void fill(std::span<std::uint8_t> out) override {
        for (auto& b : out) {
            if (pos_ == 16) refill();
            b = block_[pos_++];
        }
    }

private:
    static Bytes16 derive_key(std::uint64_t seed) {
        // splitmix64 expansion of the seed into 128 key bits.
        Bytes16 key{};
        std::uint64_t x = seed;
        for (int half = 0; half < 2; ++half) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            z ^= z >> 31;
            store_be64(z, key.data() + 8 * half);
        }
        return key;
    }

    void refill() {
        Bytes16 ctr{};
        store_be64(counter_++, ctr.data() + 8);
        block_ = cipher_.encrypt_block(ctr);
        pos_ = 0;
    }

    Aes128 cipher_;
    std::uint64_t counter_ = 0;
    Bytes16 block_{};
    unsigned pos_ = 16;
};

/// OS entropy, for unseeded CLI use.
class SystemRandomSource final : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override {
        for (auto& b : out) b = static_cast<std::uint8_t>(dev_());
    }

private:
    std::random_device dev_;
};

}  // namespace wban
