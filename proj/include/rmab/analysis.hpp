#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rmab/channel.hpp"
#include "rmab/meta.hpp"
#include "rmab/policy.hpp"
#include "rmab/rng.hpp"

namespace rmab {

struct ConfidenceValue {
    double mean = 0.0;
    double halfwidth = 0.0; // 95%, normal approximation
};

// Sample mean with 95% normal-approximation halfwidth.
ConfidenceValue mean_with_halfwidth(const std::vector<double>& samples);

struct PolicyProfile {
    PolicyKind policy = PolicyKind::Pi1;
    double u_estimate = 0.0;           // long-run per-slot reward U_i
    double u_halfwidth = 0.0;
    double transient_bound_estimate = 0.0; // empirical stand-in for C_i
};

// Long-run per-slot reward of one policy: mean over slots after
// burn_in, averaged over replications. Refuses a non-ergodic P unless
// an explicit initial belief is given.
PolicyProfile estimate_steady_reward(const TransitionMatrix& p, PolicyKind kind,
                                     int n_channels, int run_length, int burn_in,
                                     long replications, const StreamKey& key,
                                     int jobs = 1,
                                     const std::optional<BeliefVector>& initial_belief = {});

// Exact expected cumulative reward of a policy over L slots by
// exhaustive enumeration of observation sequences with exact per-branch
// posteriors. Refuses L > 20 or more than 3 channels.
double exact_expected_reward(const TransitionMatrix& p, PolicyKind kind,
                             const BeliefVector& initial_belief, int L);

struct TransientDeviation {
    BeliefVector omega;
    int length = 0;        // L
    double deviation = 0.0; // |E[sum Y] - L*U|
    double halfwidth = 0.0; // 95% halfwidth of the cumulative-reward mean
};

struct TransientBoundReport {
    double max_abs_deviation = 0.0;
    std::vector<TransientDeviation> table;
};

// Empirical transient-loss constant: |E[sum_{t<=L} Y] - L*U| over a
// grid of initial beliefs and lengths. u_i must come from
// estimate_steady_reward (or an exact source) beforehand.
TransientBoundReport estimate_transient_bound(const TransitionMatrix& p, PolicyKind kind,
                                              const std::vector<BeliefVector>& belief_grid,
                                              const std::vector<int>& l_grid,
                                              long replications, const StreamKey& key,
                                              double u_i, int jobs = 1);

struct RegretPoint {
    long n = 0;
    double genie_mean = 0.0; // mean cumulative genie reward at n
    double meta_mean = 0.0;
    double regret = 0.0;     // genie_mean - meta_mean, exactly
    double regret_halfwidth = 0.0;
    double t_n_mean = 0.0;   // mean suboptimal-block count T(n)
};

struct RegretSeries {
    std::vector<RegretPoint> checkpoints;
    long replication_count = 0;
    PolicyKind genie = PolicyKind::Pi1;
};

// Regret against the model-aware genie, estimated with common random
// numbers: per replication, the genie's base policy and the
// meta-policy run on the same realized state matrix. Checkpoints must
// lie on block boundaries of the schedule.
RegretSeries regret_curve(const TransitionMatrix& p, int n_channels,
                          const BlockSchedule& schedule, int horizon,
                          const std::vector<long>& checkpoints, long replications,
                          const BeliefVector& initial_belief, const StreamKey& key,
                          int jobs = 1);

// Sequence generators certified to keep conditional means within
// [mu - C, mu + C].
enum class LemmaOneGenerator : std::uint8_t {
    ConstantBernoulli, // E[X_t | past] = mu always
    AdversarialDrift,  // mean mu+C while the running sum is >= t*mu, else mu-C
};

struct LemmaOneConfig {
    double mu = 0.5;
    double c_drift = 0.1; // C, 0 < C < mu
    double b_range = 1.0; // X_t in [0, b]
    long n_len = 100;
    double a_offset = 0.0;
    LemmaOneGenerator generator = LemmaOneGenerator::ConstantBernoulli;
};

void validate(const LemmaOneConfig& cfg); // throws std::invalid_argument

struct ChernoffBounds {
    double upper_tail = 1.0; // bound on P{S_n >= n(mu+C) + a}
    double lower_tail = 1.0; // bound on P{S_n <= n(mu-C) - a}
};

// The two tail bounds evaluated exactly as stated.
ChernoffBounds chernoff_bound_values(const LemmaOneConfig& cfg);

struct ChernoffReport {
    double empirical_upper = 0.0;
    double empirical_lower = 0.0;
    ChernoffBounds bounds;
    bool upper_pass = false; // empirical <= bound + 3 binomial std errors
    bool lower_pass = false;
    long trials = 0;
};

// Monte Carlo check of both tail inequalities. Aborts if a generator
// ever leaves its certified conditional-mean band.
ChernoffReport verify_chernoff_variant(const LemmaOneConfig& cfg, long trials,
                                       const StreamKey& key, int jobs = 1);

} // namespace rmab
