#include "rmab/meta.hpp"

#include <cmath>
#include <stdexcept>

namespace rmab {

int block_length(int i, const BlockSchedule& schedule) {
    if (i < 1)
        throw std::invalid_argument("block index must be >= 1");
    switch (schedule.rule) {
    case BlockSchedule::Rule::Constant:
        if (schedule.constant < 1)
            throw std::invalid_argument("constant block length must be >= 1");
        return schedule.constant;
    case BlockSchedule::Rule::CeilLog:
        return static_cast<int>(std::ceil(std::log(static_cast<double>(i) + 1.0)));
    case BlockSchedule::Rule::CeilSqrt:
        return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(i))));
    case BlockSchedule::Rule::Linear:
        return i;
    }
    throw std::invalid_argument("bad schedule rule");
}

long g_of_n(long n, const BlockSchedule& schedule) {
    if (n < 1)
        throw std::invalid_argument("n must be >= 1");
    long cum = 0;
    for (int i = 1;; ++i) {
        const int k = block_length(i, schedule);
        cum += k;
        if (cum >= n)
            return k;
    }
}

std::vector<long> block_boundaries(const BlockSchedule& schedule, long horizon) {
    std::vector<long> out;
    long cum = 0;
    for (int i = 1;; ++i) {
        cum += block_length(i, schedule);
        if (cum > horizon)
            break;
        out.push_back(cum);
    }
    return out;
}

long nearest_block_boundary(const BlockSchedule& schedule, long horizon, long target) {
    const auto bounds = block_boundaries(schedule, horizon);
    if (bounds.empty())
        throw std::invalid_argument("horizon smaller than the first block");
    long best = bounds.front();
    for (long b : bounds)
        if (std::llabs(b - target) < std::llabs(best - target))
            best = b;
    return best;
}

double ucb_index(double x_hat_j, long i_j, double n) {
    if (i_j < 1 || n < 1.0)
        throw std::invalid_argument("counts must be >= 1");
    const double ij = static_cast<double>(i_j);
    return x_hat_j / ij + std::sqrt(3.0 * std::log(n) / ij);
}

namespace {

// Plays one block, appending slot records and carrying the belief.
double play_block(PolicyKind kind, const TransitionMatrix& p_env,
                  const ChannelStateMatrix& states, long block_no, long n_before,
                  int length, BeliefVector& belief, bool reset_belief,
                  const BeliefVector& run_initial_belief, Trajectory& traj) {
    const BeliefVector& start = reset_belief ? run_initial_belief : belief;
    PolicyRunResult r = run_policy(kind, p_env, states,
                                   static_cast<int>(n_before), length, start);
    for (int k = 0; k < length; ++k)
        traj.slots.push_back(SlotRecord{n_before + k + 1, block_no, kind,
                                        r.per_slot_channels[static_cast<std::size_t>(k)],
                                        r.per_slot_rewards[static_cast<std::size_t>(k)]});
    belief = std::move(r.final_belief);
    const double mean = static_cast<double>(r.reward_sum) / length;
    traj.blocks.push_back(BlockRecord{block_no, kind, length, mean, n_before + length});
    return mean;
}

} // namespace

Trajectory run_meta_policy(const TransitionMatrix& p_env,
                           const ChannelStateMatrix& states,
                           const BlockSchedule& schedule,
                           const BeliefVector& initial_belief,
                           const MetaOptions& options) {
    const long horizon = states.horizon();
    const int k1 = block_length(1, schedule);
    const int k2 = block_length(2, schedule);
    if (horizon < k1 + k2)
        throw std::invalid_argument("horizon smaller than K1 + K2 initialization");

    Trajectory traj;
    BeliefVector belief = initial_belief;
    MetaState st;

    // Initialization: one block of each policy.
    st.x_hat[0] = play_block(PolicyKind::Pi1, p_env, states, 1, 0, k1, belief,
                             options.reset_belief_each_block, initial_belief, traj);
    st.x_hat[1] = play_block(PolicyKind::Pi2, p_env, states, 2, k1, k2, belief,
                             options.reset_belief_each_block, initial_belief, traj);
    st.block_counts[0] = 1;
    st.block_counts[1] = 1;
    st.total_slots = k1 + k2;
    st.block_index = 3;

    // Main loop; a partial final block is never started.
    for (;;) {
        const int len = block_length(static_cast<int>(st.block_index), schedule);
        if (st.total_slots + len > horizon)
            break;
        const double idx1 = ucb_index(st.x_hat[0], st.block_counts[0],
                                      static_cast<double>(st.total_slots));
        const double idx2 = ucb_index(st.x_hat[1], st.block_counts[1],
                                      static_cast<double>(st.total_slots));
        const int j = idx2 > idx1 ? 1 : 0; // ties resolve to pi1
        st.block_counts[j] += 1;
        const PolicyKind kind = j == 0 ? PolicyKind::Pi1 : PolicyKind::Pi2;
        st.x_hat[j] += play_block(kind, p_env, states, st.block_index,
                                  st.total_slots, len, belief,
                                  options.reset_belief_each_block, initial_belief, traj);
        st.total_slots += len;
        st.block_index += 1;
    }
    traj.final_state = st;
    return traj;
}

Trajectory run_meta_policy(const TransitionMatrix& p_env, int n_channels,
                           const BlockSchedule& schedule, int horizon,
                           const BeliefVector& initial_belief,
                           const StreamKey& key, const MetaOptions& options) {
    const ChannelStateMatrix states =
        generate_states(p_env, n_channels, horizon, initial_belief,
                        key.with_purpose(purpose::channel_states));
    return run_meta_policy(p_env, states, schedule, initial_belief, options);
}

std::vector<std::pair<long, long>> extract_suboptimal_counts(const Trajectory& traj,
                                                             PolicyKind genie) {
    std::vector<std::pair<long, long>> out;
    out.reserve(traj.blocks.size());
    long t = 0;
    for (const BlockRecord& b : traj.blocks) {
        if (b.policy != genie)
            ++t;
        out.emplace_back(b.n_end, t);
    }
    return out;
}

} // namespace rmab
