#pragma once

#include <cstdint>
#include <vector>

#include "rmab/channel.hpp"

namespace rmab {

enum class PolicyKind : std::uint8_t { Pi1 = 1, Pi2 = 2 };

// Visit-history bookkeeping both policies consult. Slots are counted
// within the current policy run, starting at 1. Channels never visited
// in this run carry a negative pseudo-slot derived from the
// initialization rank (highest initial belief first, then lowest
// index), so that "visited longest ago" is a strict total order.
struct VisitLedger {
    std::vector<int> last_visit; // run-local slot, or negative init rank
    int current = 0;             // channel to sense next
    int slot = 0;                // run-local slots completed so far

    int n_channels() const { return static_cast<int>(last_visit.size()); }
    bool visited(int ch) const { return last_visit[ch] >= 1; }
};

// Builds a ledger from the current belief vector: the initial channel
// is the one with the highest belief (ties to the lowest index), and
// never-visited pseudo-slots follow the same descending-belief order.
VisitLedger make_ledger(const BeliefVector& belief);

// Policy pi1: stay on 1, on 0 switch to the channel visited longest ago.
int pi1_select(const VisitLedger& ledger, Observation last_observation);

// Policy pi2: stay on 0; on 1 switch to the most recently visited
// channel among those (other than the current one) whose visit gap is
// even, falling back to the channel visited longest ago.
int pi2_select(const VisitLedger& ledger, Observation last_observation);

// The model-aware selector: pi1 iff p11 >= p01.
PolicyKind genie_policy(const TransitionMatrix& p);

struct PolicyRunResult {
    long reward_sum = 0;
    std::vector<std::uint8_t> per_slot_rewards;
    std::vector<int> per_slot_channels;
    VisitLedger final_ledger;
    BeliefVector final_belief; // belief for the slot after the run
};

// Plays one policy for `length` slots against a pre-generated state
// matrix, starting at 0-based slot `start_slot`. The policy never reads
// p_env directly; it only appears through the realized states and the
// belief filter. Deterministic given its inputs.
PolicyRunResult run_policy(PolicyKind kind, const TransitionMatrix& p_env,
                           const ChannelStateMatrix& states, int start_slot,
                           int length, const BeliefVector& initial_belief);

} // namespace rmab
