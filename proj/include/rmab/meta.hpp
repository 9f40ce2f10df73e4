#pragma once

#include <cstdint>
#include <vector>

#include "rmab/channel.hpp"
#include "rmab/policy.hpp"

namespace rmab {

// Non-decreasing divergent block-length sequence {K_i}. The constant
// rule is allowed for sanity anchors but does not diverge.
struct BlockSchedule {
    enum class Rule : std::uint8_t { Constant, CeilLog, CeilSqrt, Linear };
    Rule rule = Rule::CeilLog;
    int constant = 1; // used by Rule::Constant only
};

// K_i for i >= 1.
int block_length(int i, const BlockSchedule& schedule);

// G(n): the block length in force at slot n, i.e. K_I for the smallest
// I with sum_{i<=I} K_i >= n.
long g_of_n(long n, const BlockSchedule& schedule);

// Cumulative block boundaries sum_{i<=I} K_i up to `horizon`.
std::vector<long> block_boundaries(const BlockSchedule& schedule, long horizon);

// The boundary closest to `target` (ties to the smaller boundary).
long nearest_block_boundary(const BlockSchedule& schedule, long horizon, long target);

// UCB index of line-9 form: X_hat_j / i_j + sqrt(3 ln n / i_j).
double ucb_index(double x_hat_j, long i_j, double n);

// Running statistics of the meta-policy.
struct MetaState {
    double x_hat[2] = {0.0, 0.0}; // sums of per-block sample means, per policy
    long block_counts[2] = {0, 0}; // i_1, i_2
    long total_slots = 0;          // n
    long block_index = 0;          // i
};

struct BlockRecord {
    long index = 0;       // 1-based block number
    PolicyKind policy = PolicyKind::Pi1;
    int length = 0;
    double sample_mean = 0.0;
    long n_end = 0;       // slots elapsed when the block finished
};

struct SlotRecord {
    long slot = 0; // 1-based
    long block = 0;
    PolicyKind policy = PolicyKind::Pi1;
    int channel = 0;
    std::uint8_t reward = 0;
};

struct Trajectory {
    std::vector<SlotRecord> slots;
    std::vector<BlockRecord> blocks;
    MetaState final_state;
};

struct MetaOptions {
    // Default carries the belief across blocks through the filter;
    // the hard reset to the run's initial belief is kept for
    // sensitivity checks.
    bool reset_belief_each_block = false;
};

// Runs the block-scheduled UCB meta-policy over {pi1, pi2} against a
// pre-generated state matrix. Plays pi1 for K_1 then pi2 for K_2,
// then repeatedly plays the arg-max index policy (ties to pi1) for
// K_i slots. Stops before any block that would overrun the horizon.
Trajectory run_meta_policy(const TransitionMatrix& p_env,
                           const ChannelStateMatrix& states,
                           const BlockSchedule& schedule,
                           const BeliefVector& initial_belief,
                           const MetaOptions& options = {});

// Same, generating the states internally from the key.
Trajectory run_meta_policy(const TransitionMatrix& p_env, int n_channels,
                           const BlockSchedule& schedule, int horizon,
                           const BeliefVector& initial_belief,
                           const StreamKey& key,
                           const MetaOptions& options = {});

// T(n): blocks up to slot n not using the genie policy, sampled at
// block boundaries.
std::vector<std::pair<long, long>> extract_suboptimal_counts(const Trajectory& traj,
                                                             PolicyKind genie);

} // namespace rmab
