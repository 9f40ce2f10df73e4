#include "rmab/channel.hpp"

#include <stdexcept>
#include <string>

namespace rmab {

void validate(const TransitionMatrix& p) {
    if (!(p.p01 >= 0.0 && p.p01 <= 1.0))
        throw std::invalid_argument("p01 outside [0,1]: " + std::to_string(p.p01));
    if (!(p.p11 >= 0.0 && p.p11 <= 1.0))
        throw std::invalid_argument("p11 outside [0,1]: " + std::to_string(p.p11));
}

ChannelStateMatrix generate_states(const TransitionMatrix& p, int n_channels,
                                   int horizon, const BeliefVector& initial,
                                   const StreamKey& key) {
    validate(p);
    if (horizon < 1)
        throw std::invalid_argument("horizon must be >= 1");
    if (n_channels < 2)
        throw std::invalid_argument("n_channels must be >= 2");
    if (static_cast<int>(initial.size()) != n_channels)
        throw std::invalid_argument("initial distribution size != n_channels");
    for (double w : initial)
        if (!(w >= 0.0 && w <= 1.0))
            throw std::invalid_argument("initial belief outside [0,1]");

    ChannelStateMatrix m(horizon, n_channels);
    Rng rng(key);
    // Fixed draw order (slot-major, then channel) keeps the stream
    // layout independent of the parameter values.
    for (int ch = 0; ch < n_channels; ++ch)
        m.set_state(0, ch, rng.bernoulli(initial[ch]) ? 1 : 0);
    for (int t = 1; t < horizon; ++t) {
        for (int ch = 0; ch < n_channels; ++ch) {
            const double p_one = m.state(t - 1, ch) ? p.p11 : p.p01;
            m.set_state(t, ch, rng.bernoulli(p_one) ? 1 : 0);
        }
    }
    return m;
}

double update_belief(double omega, Observation obs, const TransitionMatrix& p) {
    validate(p);
    if (!(omega >= 0.0 && omega <= 1.0))
        throw std::invalid_argument("belief outside [0,1]");
    switch (obs) {
    case Observation::saw_1: return p.p11;
    case Observation::saw_0: return p.p01;
    case Observation::unobserved: return omega * p.p11 + (1.0 - omega) * p.p01;
    }
    throw std::invalid_argument("bad observation");
}

StationaryResult stationary_probability(const TransitionMatrix& p) {
    validate(p);
    if (!p.ergodic())
        return StationaryResult{0.0, false};
    return StationaryResult{p.p01 / (p.p01 + 1.0 - p.p11), true};
}

BeliefVector stationary_belief(const TransitionMatrix& p, int n_channels) {
    const StationaryResult s = stationary_probability(p);
    if (!s.ergodic)
        throw std::invalid_argument(
            "non-ergodic transition matrix (p01=0, p11=1): supply an explicit initial belief");
    return BeliefVector(static_cast<std::size_t>(n_channels), s.probability);
}

} // namespace rmab
