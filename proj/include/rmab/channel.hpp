#pragma once

#include <cstdint>
#include <vector>

#include "rmab/rng.hpp"

namespace rmab {

// Two-state Markov channel parameters. p01 is the 0->1 transition
// probability, p11 the 1->1 probability.
struct TransitionMatrix {
    double p01 = 0.0;
    double p11 = 0.0;

    bool positively_correlated() const { return p11 >= p01; }
    // Both states absorbing: no unique stationary law.
    bool ergodic() const { return p01 + (1.0 - p11) > 0.0; }
};

void validate(const TransitionMatrix& p); // throws std::invalid_argument

using BeliefVector = std::vector<double>;

enum class Observation : std::uint8_t { saw_0 = 0, saw_1 = 1, unobserved = 2 };

// Realized binary states S_i(t) for all channels over a horizon.
// Row-major by slot: state(t, i) with t in [0, horizon), i in [0, n_channels).
class ChannelStateMatrix {
public:
    ChannelStateMatrix(int horizon, int n_channels)
        : horizon_(horizon), n_channels_(n_channels),
          states_(static_cast<std::size_t>(horizon) * n_channels, 0) {}

    int horizon() const { return horizon_; }
    int n_channels() const { return n_channels_; }

    std::uint8_t state(int slot, int channel) const {
        return states_[static_cast<std::size_t>(slot) * n_channels_ + channel];
    }
    void set_state(int slot, int channel, std::uint8_t v) {
        states_[static_cast<std::size_t>(slot) * n_channels_ + channel] = v;
    }

private:
    int horizon_;
    int n_channels_;
    std::vector<std::uint8_t> states_;
};

// Draws a full state matrix: S_i(1) ~ Bernoulli(initial[i]), then each
// column evolves independently per P. Deterministic given key.
ChannelStateMatrix generate_states(const TransitionMatrix& p, int n_channels,
                                   int horizon, const BeliefVector& initial,
                                   const StreamKey& key);

// One-step Bayesian filter for the two-state chain.
double update_belief(double omega, Observation obs, const TransitionMatrix& p);

struct StationaryResult {
    double probability = 0.0;
    bool ergodic = true; // false: p01 = 0 and p11 = 1, caller must supply a belief
};

// p01 / (p01 + 1 - p11) when the chain is ergodic.
StationaryResult stationary_probability(const TransitionMatrix& p);

// Convenience: every channel at the stationary probability. Throws on a
// non-ergodic P.
BeliefVector stationary_belief(const TransitionMatrix& p, int n_channels);

} // namespace rmab
