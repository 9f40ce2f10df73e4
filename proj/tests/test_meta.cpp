#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rmab/meta.hpp"
#include "rmab/rng.hpp"

using namespace rmab;

namespace {
const StreamKey kKey{20260826, 0, 0};
const BlockSchedule kLog{BlockSchedule::Rule::CeilLog, 1};
const BlockSchedule kLinear{BlockSchedule::Rule::Linear, 1};
const BlockSchedule kConst1{BlockSchedule::Rule::Constant, 1};
} // namespace

TEST_CASE("block_length per rule") {
    CHECK(block_length(1, kLog) == 1);
    CHECK(block_length(7, kLog) == 3); // ceil(ln 8)
    CHECK(block_length(5, kLinear) == 5);
    CHECK(block_length(9, BlockSchedule{BlockSchedule::Rule::CeilSqrt, 1}) == 3);
    CHECK(block_length(4, BlockSchedule{BlockSchedule::Rule::Constant, 7}) == 7);
    CHECK_THROWS_AS(block_length(0, kLog), std::invalid_argument);
}

TEST_CASE("block lengths are non-decreasing and divergent rules diverge") {
    for (const BlockSchedule& s :
         {kLog, kLinear, BlockSchedule{BlockSchedule::Rule::CeilSqrt, 1}}) {
        int prev = block_length(1, s);
        CHECK(prev >= 1);
        for (int i = 2; i <= 3000; ++i) {
            const int k = block_length(i, s);
            CHECK(k >= prev);
            prev = k;
        }
        CHECK(block_length(3000, s) > block_length(1, s));
    }
}

TEST_CASE("g_of_n on the linear rule") {
    CHECK(g_of_n(1, kLinear) == 1);
    CHECK(g_of_n(4, kLinear) == 3);
    CHECK(g_of_n(7, kLinear) == 4);
    long prev = 1;
    for (long n = 1; n <= 500; ++n) {
        const long g = g_of_n(n, kLog);
        CHECK(g >= prev);
        prev = g;
    }
}

TEST_CASE("ucb_index matches the line-9 formula") {
    CHECK(ucb_index(0.0, 1, 1.0) == doctest::Approx(0.0));
    CHECK(ucb_index(1.2, 3, 20.0) ==
          doctest::Approx(0.4 + std::sqrt(3.0 * std::log(20.0) / 3.0)));
    CHECK(ucb_index(1.2, 3, 20.0) == doctest::Approx(2.1309).epsilon(1e-4));
    CHECK(ucb_index(0.5, 1, std::exp(1.0)) == doctest::Approx(0.5 + std::sqrt(3.0)));
}

TEST_CASE("initialization plays pi1 then pi2 with K1=K2=1") {
    const Trajectory traj =
        run_meta_policy({0.4, 0.6}, 2, kConst1, 2, {0.5, 0.5}, kKey);
    REQUIRE(traj.blocks.size() == 2);
    CHECK(traj.blocks[0].policy == PolicyKind::Pi1);
    CHECK(traj.blocks[1].policy == PolicyKind::Pi2);
    CHECK(traj.final_state.total_slots == 2);
    CHECK(traj.final_state.block_index == 3);
    CHECK(traj.final_state.block_counts[0] == 1);
    CHECK(traj.final_state.block_counts[1] == 1);
}

TEST_CASE("meta rejects a horizon below K1+K2") {
    CHECK_THROWS_AS(run_meta_policy({0.4, 0.6}, 2, kConst1, 1, {0.5, 0.5}, kKey),
                    std::invalid_argument);
}

TEST_CASE("slot accounting is exact at every block boundary") {
    const Trajectory traj =
        run_meta_policy({0.2, 0.8}, 2, kLog, 5000, {0.5, 0.5}, kKey);
    long cum = 0;
    long blocks_seen = 0;
    for (const BlockRecord& b : traj.blocks) {
        ++blocks_seen;
        CHECK(b.index == blocks_seen);
        CHECK(b.length == block_length(static_cast<int>(b.index), kLog));
        cum += b.length;
        CHECK(b.n_end == cum);
        CHECK(b.sample_mean >= 0.0);
        CHECK(b.sample_mean <= 1.0);
    }
    CHECK(traj.final_state.total_slots == cum);
    CHECK(traj.final_state.block_index == blocks_seen + 1);
    CHECK(traj.final_state.block_counts[0] + traj.final_state.block_counts[1] ==
          traj.final_state.block_index - 1);
    // per-policy mean estimates stay in [0,1]
    for (int j = 0; j < 2; ++j) {
        CHECK(traj.final_state.block_counts[j] >= 1);
        const double mean = traj.final_state.x_hat[j] / traj.final_state.block_counts[j];
        CHECK(mean >= 0.0);
        CHECK(mean <= 1.0);
    }
    // slot records partition [1, n]
    CHECK(static_cast<long>(traj.slots.size()) == cum);
    for (std::size_t k = 0; k < traj.slots.size(); ++k)
        CHECK(traj.slots[k].slot == static_cast<long>(k) + 1);
}

TEST_CASE("identical keys reproduce the trajectory bit for bit") {
    const Trajectory a = run_meta_policy({0.1, 0.9}, 2, kLog, 20000, {0.5, 0.5}, kKey);
    const Trajectory b = run_meta_policy({0.1, 0.9}, 2, kLog, 20000, {0.5, 0.5}, kKey);
    REQUIRE(a.slots.size() == b.slots.size());
    for (std::size_t k = 0; k < a.slots.size(); ++k) {
        CHECK(a.slots[k].channel == b.slots[k].channel);
        CHECK(a.slots[k].reward == b.slots[k].reward);
        CHECK(a.slots[k].policy == b.slots[k].policy);
    }
}

TEST_CASE("argmax is invariant to a common shift of both means") {
    Rng rng(kKey.with_purpose(3));
    for (int trial = 0; trial < 500; ++trial) {
        const long i1 = 1 + static_cast<long>(rng.uniform01() * 20);
        const long i2 = 1 + static_cast<long>(rng.uniform01() * 20);
        const double x1 = rng.uniform01() * i1;
        const double x2 = rng.uniform01() * i2;
        const double n = 2.0 + rng.uniform01() * 1000.0;
        const double c = (rng.uniform01() - 0.5) * 10.0;
        const bool base = ucb_index(x2, i2, n) > ucb_index(x1, i1, n);
        const bool shifted =
            ucb_index(x2 + c * i2, i2, n) > ucb_index(x1 + c * i1, i1, n);
        CHECK(base == shifted);
    }
}

TEST_CASE("i.i.d. channels split blocks evenly between the arms") {
    const TransitionMatrix p{0.4, 0.4};
    double frac = 0.0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
        const Trajectory traj = run_meta_policy(p, 2, kLog, 20000, {0.4, 0.4},
                                                kKey.with_replication(r));
        frac += static_cast<double>(traj.final_state.block_counts[1]) /
                (traj.final_state.block_counts[0] + traj.final_state.block_counts[1]);
    }
    frac /= reps;
    CHECK(frac > 0.35);
    CHECK(frac < 0.65);
}

TEST_CASE("with a constant schedule and P=(p,p) the meta earns p per slot") {
    const TransitionMatrix p{0.6, 0.6};
    const BlockSchedule sched{BlockSchedule::Rule::Constant, 5};
    double mean = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
        const Trajectory traj =
            run_meta_policy(p, 2, sched, 20000, {0.6, 0.6}, kKey.with_replication(r));
        long sum = 0;
        for (const SlotRecord& s : traj.slots)
            sum += s.reward;
        mean += static_cast<double>(sum) / traj.final_state.total_slots;
    }
    mean /= reps;
    CHECK(mean == doctest::Approx(0.6).epsilon(0.02));
}

TEST_CASE("extract_suboptimal_counts") {
    const Trajectory traj =
        run_meta_policy({0.1, 0.9}, 2, kConst1, 2, {0.5, 0.5}, kKey);
    SUBCASE("forced initialization counts one suboptimal block") {
        const auto t = extract_suboptimal_counts(traj, PolicyKind::Pi1);
        REQUIRE(t.size() == 2);
        CHECK(t[0] == std::pair<long, long>{1, 0});
        CHECK(t[1] == std::pair<long, long>{2, 1});
    }
    SUBCASE("every block on the genie means T(n)=0") {
        Trajectory all_genie = traj;
        for (BlockRecord& b : all_genie.blocks)
            b.policy = PolicyKind::Pi1;
        for (const auto& [n, t] : extract_suboptimal_counts(all_genie, PolicyKind::Pi1))
            CHECK(t == 0);
    }
    SUBCASE("T(n) is non-decreasing") {
        const Trajectory long_run =
            run_meta_policy({0.1, 0.9}, 2, kLog, 50000, {0.5, 0.5}, kKey);
        const auto t = extract_suboptimal_counts(long_run, PolicyKind::Pi1);
        for (std::size_t k = 1; k < t.size(); ++k)
            CHECK(t[k].second >= t[k - 1].second);
    }
}

TEST_CASE("suboptimal arm's block share vanishes on a well-separated P") {
    const TransitionMatrix p{0.1, 0.9};
    double share = 0.0;
    const int reps = 5;
    for (int r = 0; r < reps; ++r) {
        const Trajectory traj =
            run_meta_policy(p, 2, kLog, 100000, {0.5, 0.5}, kKey.with_replication(r));
        const auto t = extract_suboptimal_counts(traj, genie_policy(p));
        share += static_cast<double>(t.back().second) / traj.blocks.size();
    }
    CHECK(share / reps < 0.15);
}
