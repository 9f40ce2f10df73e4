#include "rmab/policy.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rmab {

VisitLedger make_ledger(const BeliefVector& belief) {
    const int n = static_cast<int>(belief.size());
    if (n < 1)
        throw std::invalid_argument("empty belief vector");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return belief[a] > belief[b];
    });
    VisitLedger ledger;
    ledger.last_visit.assign(static_cast<std::size_t>(n), 0);
    // rank r gets pseudo-slot r - n, all strictly below any real slot >= 1
    for (int r = 0; r < n; ++r)
        ledger.last_visit[order[r]] = r - n;
    ledger.current = order[0];
    ledger.slot = 0;
    return ledger;
}

namespace {

int oldest_channel(const VisitLedger& ledger) {
    int best = 0;
    for (int ch = 1; ch < ledger.n_channels(); ++ch)
        if (ledger.last_visit[ch] < ledger.last_visit[best])
            best = ch;
    return best;
}

} // namespace

int pi1_select(const VisitLedger& ledger, Observation last_observation) {
    if (last_observation == Observation::unobserved ||
        last_observation == Observation::saw_1)
        return ledger.current;
    return oldest_channel(ledger);
}

int pi2_select(const VisitLedger& ledger, Observation last_observation) {
    if (last_observation == Observation::unobserved ||
        last_observation == Observation::saw_0)
        return ledger.current;
    // Among previously visited channels other than the current one with
    // an even visit gap, take the most recently visited.
    int best = -1;
    for (int ch = 0; ch < ledger.n_channels(); ++ch) {
        if (ch == ledger.current || !ledger.visited(ch))
            continue;
        if ((ledger.slot - ledger.last_visit[ch]) % 2 != 0)
            continue;
        if (best < 0 || ledger.last_visit[ch] > ledger.last_visit[best])
            best = ch;
    }
    return best >= 0 ? best : oldest_channel(ledger);
}

PolicyKind genie_policy(const TransitionMatrix& p) {
    validate(p);
    return p.positively_correlated() ? PolicyKind::Pi1 : PolicyKind::Pi2;
}

PolicyRunResult run_policy(PolicyKind kind, const TransitionMatrix& p_env,
                           const ChannelStateMatrix& states, int start_slot,
                           int length, const BeliefVector& initial_belief) {
    validate(p_env);
    if (length < 1)
        throw std::invalid_argument("run length must be >= 1");
    if (start_slot < 0 || start_slot + length > states.horizon())
        throw std::invalid_argument("slot window out of range");
    if (static_cast<int>(initial_belief.size()) != states.n_channels())
        throw std::invalid_argument("belief size != n_channels");

    PolicyRunResult out;
    out.per_slot_rewards.reserve(static_cast<std::size_t>(length));
    out.per_slot_channels.reserve(static_cast<std::size_t>(length));
    VisitLedger ledger = make_ledger(initial_belief);
    BeliefVector belief = initial_belief;

    for (int k = 0; k < length; ++k) {
        const int ch = ledger.current;
        const std::uint8_t s = states.state(start_slot + k, ch);
        out.reward_sum += s;
        out.per_slot_rewards.push_back(s);
        out.per_slot_channels.push_back(ch);

        ledger.slot = k + 1;
        ledger.last_visit[ch] = k + 1;
        const Observation obs = s ? Observation::saw_1 : Observation::saw_0;
        const int next = kind == PolicyKind::Pi1 ? pi1_select(ledger, obs)
                                                 : pi2_select(ledger, obs);
        for (int c = 0; c < states.n_channels(); ++c)
            belief[c] = update_belief(
                belief[c], c == ch ? obs : Observation::unobserved, p_env);
        ledger.current = next;
    }
    out.final_ledger = std::move(ledger);
    out.final_belief = std::move(belief);
    return out;
}

} // namespace rmab
