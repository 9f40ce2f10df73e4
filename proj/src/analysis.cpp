#include "rmab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rmab/parallel.hpp"

namespace rmab {

ConfidenceValue mean_with_halfwidth(const std::vector<double>& samples) {
    if (samples.empty())
        throw std::invalid_argument("no samples");
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double s : samples)
        sum += s;
    const double mean = sum / n;
    if (samples.size() == 1)
        return ConfidenceValue{mean, 0.0};
    double ss = 0.0;
    for (double s : samples)
        ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return ConfidenceValue{mean, 1.96 * sd / std::sqrt(n)};
}

namespace {

BeliefVector resolve_belief(const TransitionMatrix& p, int n_channels,
                            const std::optional<BeliefVector>& explicit_belief) {
    if (explicit_belief) {
        if (static_cast<int>(explicit_belief->size()) != n_channels)
            throw std::invalid_argument("initial belief size != n_channels");
        return *explicit_belief;
    }
    return stationary_belief(p, n_channels); // throws on non-ergodic P
}

} // namespace

PolicyProfile estimate_steady_reward(const TransitionMatrix& p, PolicyKind kind,
                                     int n_channels, int run_length, int burn_in,
                                     long replications, const StreamKey& key,
                                     int jobs,
                                     const std::optional<BeliefVector>& initial_belief) {
    if (burn_in < 0 || run_length <= burn_in)
        throw std::invalid_argument("need run_length > burn_in >= 0");
    if (replications < 1)
        throw std::invalid_argument("replications must be >= 1");
    const BeliefVector omega = resolve_belief(p, n_channels, initial_belief);

    std::vector<double> per_rep(static_cast<std::size_t>(replications), 0.0);
    for_each_replication(replications, jobs, [&](long r) {
        const ChannelStateMatrix states = generate_states(
            p, n_channels, run_length, omega,
            key.with_replication(static_cast<std::uint64_t>(r))
                .with_purpose(purpose::channel_states));
        const PolicyRunResult run = run_policy(kind, p, states, 0, run_length, omega);
        long sum = 0;
        for (int t = burn_in; t < run_length; ++t)
            sum += run.per_slot_rewards[static_cast<std::size_t>(t)];
        per_rep[static_cast<std::size_t>(r)] =
            static_cast<double>(sum) / (run_length - burn_in);
    });
    const ConfidenceValue cv = mean_with_halfwidth(per_rep);
    return PolicyProfile{kind, cv.mean, cv.halfwidth, 0.0};
}

namespace {

// One node of the observation tree: expected reward from `depth` on,
// given exact per-channel posteriors and the run-local visit history.
double oracle_branch(const TransitionMatrix& p, PolicyKind kind,
                     const BeliefVector& belief, const VisitLedger& ledger,
                     int depth, int length) {
    const int ch = ledger.current;
    const double w = belief[static_cast<std::size_t>(ch)];
    if (depth == length - 1)
        return w;

    double value = w;
    for (int obs_bit = 1; obs_bit >= 0; --obs_bit) {
        const double prob = obs_bit ? w : 1.0 - w;
        if (prob == 0.0)
            continue;
        const Observation obs = obs_bit ? Observation::saw_1 : Observation::saw_0;
        VisitLedger next = ledger;
        next.slot = depth + 1;
        next.last_visit[static_cast<std::size_t>(ch)] = depth + 1;
        next.current = kind == PolicyKind::Pi1 ? pi1_select(next, obs)
                                               : pi2_select(next, obs);
        BeliefVector next_belief(belief.size());
        for (std::size_t c = 0; c < belief.size(); ++c)
            next_belief[c] = update_belief(
                belief[c], static_cast<int>(c) == ch ? obs : Observation::unobserved, p);
        value += prob * oracle_branch(p, kind, next_belief, next, depth + 1, length);
    }
    return value;
}

} // namespace

double exact_expected_reward(const TransitionMatrix& p, PolicyKind kind,
                             const BeliefVector& initial_belief, int L) {
    validate(p);
    if (L < 1)
        throw std::invalid_argument("L must be >= 1");
    if (L > 20 || initial_belief.size() > 3)
        throw std::invalid_argument(
            "exhaustive oracle limited to L <= 20 and N <= 3; use Monte Carlo");
    for (double w : initial_belief)
        if (!(w >= 0.0 && w <= 1.0))
            throw std::invalid_argument("belief outside [0,1]");
    return oracle_branch(p, kind, initial_belief, make_ledger(initial_belief), 0, L);
}

TransientBoundReport estimate_transient_bound(const TransitionMatrix& p, PolicyKind kind,
                                              const std::vector<BeliefVector>& belief_grid,
                                              const std::vector<int>& l_grid,
                                              long replications, const StreamKey& key,
                                              double u_i, int jobs) {
    if (belief_grid.empty() || l_grid.empty())
        throw std::invalid_argument("empty grid");
    if (replications < 1)
        throw std::invalid_argument("replications must be >= 1");

    TransientBoundReport report;
    std::uint64_t cell = 0;
    for (const BeliefVector& omega : belief_grid) {
        const int n_channels = static_cast<int>(omega.size());
        for (int L : l_grid) {
            std::vector<double> sums(static_cast<std::size_t>(replications), 0.0);
            // Distinct purpose per grid cell: cells never share draws.
            const StreamKey cell_key =
                key.with_purpose(purpose::channel_states + 16 * ++cell);
            for_each_replication(replications, jobs, [&](long r) {
                const ChannelStateMatrix states = generate_states(
                    p, n_channels, L, omega,
                    cell_key.with_replication(static_cast<std::uint64_t>(r)));
                sums[static_cast<std::size_t>(r)] = static_cast<double>(
                    run_policy(kind, p, states, 0, L, omega).reward_sum);
            });
            const ConfidenceValue cv = mean_with_halfwidth(sums);
            const double dev = std::abs(cv.mean - L * u_i);
            report.table.push_back(TransientDeviation{omega, L, dev, cv.halfwidth});
            report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
        }
    }
    return report;
}

RegretSeries regret_curve(const TransitionMatrix& p, int n_channels,
                          const BlockSchedule& schedule, int horizon,
                          const std::vector<long>& checkpoints, long replications,
                          const BeliefVector& initial_belief, const StreamKey& key,
                          int jobs) {
    if (replications < 1)
        throw std::invalid_argument("replications must be >= 1");
    if (checkpoints.empty())
        throw std::invalid_argument("no checkpoints");
    {
        const std::vector<long> bounds = block_boundaries(schedule, horizon);
        for (long c : checkpoints)
            if (!std::binary_search(bounds.begin(), bounds.end(), c))
                throw std::invalid_argument("checkpoint " + std::to_string(c) +
                                            " is not a block boundary");
    }
    std::vector<long> cps = checkpoints;
    std::sort(cps.begin(), cps.end());
    const std::size_t n_cp = cps.size();
    const PolicyKind genie = genie_policy(p);

    // Slot-indexed per-replication storage; reduced serially below.
    std::vector<double> genie_cum(static_cast<std::size_t>(replications) * n_cp);
    std::vector<double> meta_cum(static_cast<std::size_t>(replications) * n_cp);
    std::vector<double> t_n(static_cast<std::size_t>(replications) * n_cp);

    for_each_replication(replications, jobs, [&](long r) {
        const StreamKey rep_key = key.with_replication(static_cast<std::uint64_t>(r))
                                      .with_purpose(purpose::channel_states);
        const ChannelStateMatrix states =
            generate_states(p, n_channels, horizon, initial_belief, rep_key);

        const PolicyRunResult genie_run =
            run_policy(genie, p, states, 0, horizon, initial_belief);
        long cum = 0;
        std::size_t c = 0;
        for (long t = 1; t <= horizon && c < n_cp; ++t) {
            cum += genie_run.per_slot_rewards[static_cast<std::size_t>(t - 1)];
            while (c < n_cp && cps[c] == t)
                genie_cum[static_cast<std::size_t>(r) * n_cp + c++] =
                    static_cast<double>(cum);
        }

        const Trajectory traj = run_meta_policy(p, states, schedule, initial_belief);
        cum = 0;
        c = 0;
        for (const SlotRecord& s : traj.slots) {
            cum += s.reward;
            while (c < n_cp && cps[c] == s.slot)
                meta_cum[static_cast<std::size_t>(r) * n_cp + c++] =
                    static_cast<double>(cum);
        }
        const auto subopt = extract_suboptimal_counts(traj, genie);
        c = 0;
        for (const auto& [n_end, t_count] : subopt) {
            while (c < n_cp && cps[c] <= n_end) {
                if (cps[c] == n_end)
                    t_n[static_cast<std::size_t>(r) * n_cp + c] =
                        static_cast<double>(t_count);
                ++c;
            }
        }
    });

    RegretSeries series;
    series.replication_count = replications;
    series.genie = genie;
    for (std::size_t c = 0; c < n_cp; ++c) {
        std::vector<double> g(static_cast<std::size_t>(replications));
        std::vector<double> m(static_cast<std::size_t>(replications));
        std::vector<double> d(static_cast<std::size_t>(replications));
        std::vector<double> t(static_cast<std::size_t>(replications));
        for (long r = 0; r < replications; ++r) {
            const std::size_t idx = static_cast<std::size_t>(r) * n_cp + c;
            g[static_cast<std::size_t>(r)] = genie_cum[idx];
            m[static_cast<std::size_t>(r)] = meta_cum[idx];
            d[static_cast<std::size_t>(r)] = genie_cum[idx] - meta_cum[idx];
            t[static_cast<std::size_t>(r)] = t_n[idx];
        }
        RegretPoint pt;
        pt.n = cps[c];
        pt.genie_mean = mean_with_halfwidth(g).mean;
        pt.meta_mean = mean_with_halfwidth(m).mean;
        pt.regret = pt.genie_mean - pt.meta_mean;
        pt.regret_halfwidth = mean_with_halfwidth(d).halfwidth;
        pt.t_n_mean = mean_with_halfwidth(t).mean;
        series.checkpoints.push_back(pt);
    }
    return series;
}

void validate(const LemmaOneConfig& cfg) {
    if (!(cfg.c_drift > 0.0 && cfg.c_drift < cfg.mu))
        throw std::invalid_argument("need 0 < C < mu");
    if (!(cfg.b_range > 0.0))
        throw std::invalid_argument("need b > 0");
    if (cfg.n_len < 1)
        throw std::invalid_argument("need n >= 1");
    if (cfg.a_offset < 0.0)
        throw std::invalid_argument("need a >= 0");
    if (cfg.mu + cfg.c_drift > cfg.b_range)
        throw std::invalid_argument(
            "shipped generators need mu + C <= b to realize the mean band");
}

ChernoffBounds chernoff_bound_values(const LemmaOneConfig& cfg) {
    validate(cfg);
    const double n = static_cast<double>(cfg.n_len);
    const double upper_arg =
        cfg.a_offset * (cfg.mu - cfg.c_drift) / (cfg.b_range * (cfg.mu + cfg.c_drift));
    const double lower_arg = cfg.a_offset / cfg.b_range;
    return ChernoffBounds{std::exp(-2.0 * upper_arg * upper_arg / n),
                          std::exp(-2.0 * lower_arg * lower_arg / n)};
}

ChernoffReport verify_chernoff_variant(const LemmaOneConfig& cfg, long trials,
                                       const StreamKey& key, int jobs) {
    validate(cfg);
    if (trials < 1)
        throw std::invalid_argument("trials must be >= 1");

    const double upper_threshold = cfg.n_len * (cfg.mu + cfg.c_drift) + cfg.a_offset;
    const double lower_threshold = cfg.n_len * (cfg.mu - cfg.c_drift) - cfg.a_offset;

    std::vector<std::uint8_t> upper_hit(static_cast<std::size_t>(trials), 0);
    std::vector<std::uint8_t> lower_hit(static_cast<std::size_t>(trials), 0);
    for_each_replication(trials, jobs, [&](long r) {
        Rng rng(key.with_replication(static_cast<std::uint64_t>(r))
                    .with_purpose(purpose::chernoff_trials));
        double s = 0.0;
        for (long t = 1; t <= cfg.n_len; ++t) {
            double mean;
            switch (cfg.generator) {
            case LemmaOneGenerator::ConstantBernoulli:
                mean = cfg.mu;
                break;
            case LemmaOneGenerator::AdversarialDrift:
                mean = s >= static_cast<double>(t - 1) * cfg.mu ? cfg.mu + cfg.c_drift
                                                                : cfg.mu - cfg.c_drift;
                break;
            default:
                throw std::invalid_argument("bad generator");
            }
            if (mean < cfg.mu - cfg.c_drift - 1e-12 || mean > cfg.mu + cfg.c_drift + 1e-12)
                throw std::logic_error("generator left its certified mean band");
            s += rng.bernoulli(mean / cfg.b_range) ? cfg.b_range : 0.0;
        }
        upper_hit[static_cast<std::size_t>(r)] = s >= upper_threshold ? 1 : 0;
        lower_hit[static_cast<std::size_t>(r)] = s <= lower_threshold ? 1 : 0;
    });

    long up = 0;
    long lo = 0;
    for (long r = 0; r < trials; ++r) {
        up += upper_hit[static_cast<std::size_t>(r)];
        lo += lower_hit[static_cast<std::size_t>(r)];
    }
    ChernoffReport rep;
    rep.trials = trials;
    rep.empirical_upper = static_cast<double>(up) / static_cast<double>(trials);
    rep.empirical_lower = static_cast<double>(lo) / static_cast<double>(trials);
    rep.bounds = chernoff_bound_values(cfg);
    const auto slack = [trials](double f) {
        return 3.0 * std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
    };
    rep.upper_pass = rep.empirical_upper <=
                     rep.bounds.upper_tail + slack(rep.empirical_upper);
    rep.lower_pass = rep.empirical_lower <=
                     rep.bounds.lower_tail + slack(rep.empirical_lower);
    return rep;
}

} // namespace rmab
