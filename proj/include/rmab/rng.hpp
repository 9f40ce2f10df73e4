#pragma once

#include <cstdint>

namespace rmab {

// Identifies one pseudo-random stream. Distinct (master_seed,
// replication, purpose) triples give independent streams; identical
// triples give identical streams.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t replication = 0;
    std::uint64_t purpose = 0;

    StreamKey with_replication(std::uint64_t r) const {
        return StreamKey{master_seed, r, purpose};
    }
    StreamKey with_purpose(std::uint64_t p) const {
        return StreamKey{master_seed, replication, p};
    }
};

// Purpose tags used across the library so that independent concerns
// never share a stream.
namespace purpose {
inline constexpr std::uint64_t channel_states = 0;
inline constexpr std::uint64_t chernoff_trials = 1;
} // namespace purpose

// SplitMix64 (Steele, Lea, Vigna 2014), the sequence used by
// java.util.SplittableRandom. Chosen because it is a published, named
// algorithm with a trivial bit-exact implementation; output does not
// depend on the platform's std::uniform_* distributions.
class Rng {
public:
    explicit Rng(const StreamKey& key) : state_(derive(key)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t scramble(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
        return z ^ (z >> 33);
    }

    // Fold the three key components into the initial state with a
    // full-avalanche mix between each, so that e.g. (seed=1, rep=0)
    // and (seed=0, rep=1) land in unrelated positions.
    static std::uint64_t derive(const StreamKey& key) {
        std::uint64_t s = scramble(key.master_seed + 0x9e3779b97f4a7c15ULL);
        s = scramble(s ^ (key.replication + 0xbf58476d1ce4e5b9ULL));
        s = scramble(s ^ (key.purpose + 0x94d049bb133111ebULL));
        return s;
    }

    std::uint64_t state_;
};

} // namespace rmab
