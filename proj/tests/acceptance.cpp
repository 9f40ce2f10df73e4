// Acceptance suite: one pass/fail line per criterion, nonzero exit on
// any failure. Deterministic: everything is derived from kSeed.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rmab/analysis.hpp"
#include "rmab/cli.hpp"

using namespace rmab;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20260826;
const BlockSchedule kLog{BlockSchedule::Rule::CeilLog, 1};

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                name, detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Exact binomial upper tail P{X >= k}, X ~ Bin(n, p). Independent
// oracle for the Monte Carlo tail estimates.
double binomial_upper_tail(int n, int k, double p) {
    double tail = 0.0;
    for (int j = k; j <= n; ++j) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                                std::lgamma(n - j + 1.0) + j * std::log(p) +
                                (n - j) * std::log(1.0 - p);
        tail += std::exp(log_term);
    }
    return tail;
}

// --- criterion 1: i.i.d. sanity ------------------------------------------

void criterion_1() {
    const TransitionMatrix p{0.5, 0.5};
    const int horizon = 100000;
    const long reps = 50;
    const BeliefVector omega{0.5, 0.5};

    bool pass = true;
    std::ostringstream detail;
    for (PolicyKind kind : {PolicyKind::Pi1, PolicyKind::Pi2}) {
        const PolicyProfile prof = estimate_steady_reward(
            p, kind, 2, horizon, 0, reps, StreamKey{kSeed, 0, 0});
        pass = pass && std::abs(prof.u_estimate - 0.5) <= 0.005;
        detail << (kind == PolicyKind::Pi1 ? "pi1=" : "pi2=") << fmt(prof.u_estimate)
               << ' ';
    }

    const std::vector<long> cps = {
        nearest_block_boundary(kLog, horizon, 1000),
        nearest_block_boundary(kLog, horizon, 10000),
        nearest_block_boundary(kLog, horizon, 100000)};
    const RegretSeries series =
        regret_curve(p, 2, kLog, horizon, cps, reps, omega, StreamKey{kSeed, 0, 0});
    const RegretPoint& last = series.checkpoints.back();
    const double meta_per_slot = last.meta_mean / static_cast<double>(last.n);
    pass = pass && std::abs(meta_per_slot - 0.5) <= 0.005;
    detail << "meta=" << fmt(meta_per_slot) << " |R/n|=";
    for (const RegretPoint& pt : series.checkpoints) {
        const double rn = std::abs(pt.regret) / static_cast<double>(pt.n);
        pass = pass && rn <= 0.01;
        detail << fmt(rn) << ' ';
    }
    report(1, "i.i.d. sanity, null regret", pass, detail.str());
}

// --- criterion 2: oracle equivalence --------------------------------------

void criterion_2() {
    const TransitionMatrix p{0.2, 0.8};
    const int L = 12;
    const long reps = 100000;
    const BeliefVector omega = stationary_belief(p, 2);

    bool pass = true;
    std::ostringstream detail;
    for (PolicyKind kind : {PolicyKind::Pi1, PolicyKind::Pi2}) {
        const double exact = exact_expected_reward(p, kind, omega, L);
        std::vector<double> sums(static_cast<std::size_t>(reps));
        const StreamKey base{kSeed, 0, 10 + static_cast<std::uint64_t>(kind)};
        for (long r = 0; r < reps; ++r) {
            const ChannelStateMatrix states = generate_states(
                p, 2, L, omega, base.with_replication(static_cast<std::uint64_t>(r)));
            sums[static_cast<std::size_t>(r)] = static_cast<double>(
                run_policy(kind, p, states, 0, L, omega).reward_sum);
        }
        const ConfidenceValue cv = mean_with_halfwidth(sums);
        const double se = cv.halfwidth / 1.96;
        const double z = std::abs(cv.mean - exact) / se;
        pass = pass && z <= 3.0;
        detail << (kind == PolicyKind::Pi1 ? "pi1" : "pi2") << ": exact=" << fmt(exact)
               << " mc=" << fmt(cv.mean) << " z=" << fmt(z) << "  ";
    }
    report(2, "oracle equivalence at L=12", pass, detail.str());
}

// --- criterion 3: genie ordering ------------------------------------------

void criterion_3() {
    bool pass = true;
    std::ostringstream detail;
    int cell = 0;
    for (double p11 : {0.7, 0.8, 0.9}) {
        for (int n_channels : {2, 3}) {
            for (bool swapped : {false, true}) {
                const TransitionMatrix p = swapped
                                               ? TransitionMatrix{p11, 1.0 - p11}
                                               : TransitionMatrix{1.0 - p11, p11};
                const StreamKey key{kSeed, 0, 20 + static_cast<std::uint64_t>(++cell)};
                const PolicyProfile u1 = estimate_steady_reward(
                    p, PolicyKind::Pi1, n_channels, 40000, 2000, 24, key);
                const PolicyProfile u2 = estimate_steady_reward(
                    p, PolicyKind::Pi2, n_channels, 40000, 2000, 24,
                    key.with_purpose(60 + static_cast<std::uint64_t>(cell)));
                const bool ok =
                    swapped ? u2.u_estimate - u2.u_halfwidth >
                                  u1.u_estimate + u1.u_halfwidth
                            : u1.u_estimate - u1.u_halfwidth >
                                  u2.u_estimate + u2.u_halfwidth;
                pass = pass && ok;
                if (!ok)
                    detail << "violation at p11=" << p11 << " N=" << n_channels
                           << " swapped=" << swapped << " U1=" << fmt(u1.u_estimate)
                           << " U2=" << fmt(u2.u_estimate) << "  ";
            }
        }
    }
    if (pass)
        detail << "all 12 grid cells ordered with non-overlapping 95% CIs";
    report(3, "genie ordering over the correlation grid", pass, detail.str());
}

// --- criterion 4: Lemma-2-style boundedness -------------------------------

void criterion_4() {
    const TransitionMatrix p{0.2, 0.8};
    const long reps = 10000;

    // High-precision U_1 first.
    const PolicyProfile u = estimate_steady_reward(
        p, PolicyKind::Pi1, 2, 1000000, 5000, 20, StreamKey{kSeed, 0, 40});

    const std::vector<BeliefVector> grid = {{0.0, 0.0}, {1.0, 1.0},
                                            stationary_belief(p, 2)};
    const std::vector<int> l_grid = {10, 100, 1000};
    const TransientBoundReport rep = estimate_transient_bound(
        p, PolicyKind::Pi1, grid, l_grid, reps, StreamKey{kSeed, 0, 41},
        u.u_estimate);

    bool pass = true;
    std::ostringstream detail;
    detail << "U1=" << fmt(u.u_estimate) << "+-" << fmt(u.u_halfwidth) << ' ';
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const TransientDeviation& d100 = rep.table[g * l_grid.size() + 1];
        const TransientDeviation& d1000 = rep.table[g * l_grid.size() + 2];
        const double slack = d100.halfwidth + d1000.halfwidth;
        const bool bounded = d1000.deviation <= d100.deviation + slack;
        const bool small = d1000.deviation / 1000.0 <= 0.01;
        pass = pass && bounded && small;
        detail << "dev100=" << fmt(d100.deviation) << " dev1000=" << fmt(d1000.deviation)
               << "  ";
    }
    report(4, "transient loss bounded, not growing in L", pass, detail.str());
}

// --- criterion 5: regret growth shape -------------------------------------

void criterion_5() {
    const TransitionMatrix p{0.1, 0.9};
    const int horizon = 210000;
    const long reps = 200;
    const BeliefVector omega = stationary_belief(p, 2);
    const std::vector<long> cps = {
        nearest_block_boundary(kLog, horizon, 2000),
        nearest_block_boundary(kLog, horizon, 20000),
        nearest_block_boundary(kLog, horizon, 200000)};

    const RegretSeries series =
        regret_curve(p, 2, kLog, horizon, cps, reps, omega, StreamKey{kSeed, 0, 50});

    std::vector<double> norm;
    std::vector<double> lnn;
    std::vector<double> tn;
    for (const RegretPoint& pt : series.checkpoints) {
        const double g = static_cast<double>(g_of_n(pt.n, kLog));
        norm.push_back(pt.regret / (g * std::log(static_cast<double>(pt.n))));
        lnn.push_back(std::log(static_cast<double>(pt.n)));
        tn.push_back(pt.t_n_mean);
    }
    const bool shape = norm.back() <= norm.front();

    // least-squares fit of T(n) against ln n; R^2 >= 0.8
    const std::size_t m = lnn.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += lnn[i];
        my += tn[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxy += (lnn[i] - mx) * (tn[i] - my);
        sxx += (lnn[i] - mx) * (lnn[i] - mx);
        syy += (tn[i] - my) * (tn[i] - my);
    }
    const double r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    const bool log_fit = r2 >= 0.8;

    std::ostringstream detail;
    detail << "R/(G ln n): " << fmt(norm.front()) << " -> " << fmt(norm.back())
           << "; T(n): " << fmt(tn.front()) << " -> " << fmt(tn.back())
           << "; R^2=" << fmt(r2);
    report(5, "near-logarithmic regret shape", shape && log_fit, detail.str());
}

// --- criterion 6: concentration-bound verification ------------------------

void criterion_6() {
    const long trials = 100000;
    bool pass = true;
    std::ostringstream detail;
    int cell = 0;
    for (LemmaOneGenerator g : {LemmaOneGenerator::ConstantBernoulli,
                                LemmaOneGenerator::AdversarialDrift}) {
        for (long n : {10L, 100L}) {
            for (double a : {0.0, std::sqrt(static_cast<double>(n)), 0.1 * n}) {
                const LemmaOneConfig cfg{0.5, 0.1, 1.0, n, a, g};
                const ChernoffReport rep = verify_chernoff_variant(
                    cfg, trials, StreamKey{kSeed, 0, 70 + static_cast<std::uint64_t>(++cell)});
                if (!(rep.upper_pass && rep.lower_pass)) {
                    pass = false;
                    detail << "tail bound violated at gen=" << static_cast<int>(g)
                           << " n=" << n << " a=" << fmt(a) << "  ";
                }
            }
        }
    }

    // Exact binomial tail oracle versus the Monte Carlo estimate at
    // (constant Bernoulli(0.5), n=100, a=10).
    const LemmaOneConfig cfg{0.5, 0.1, 1.0, 100, 10.0,
                             LemmaOneGenerator::ConstantBernoulli};
    const ChernoffReport rep =
        verify_chernoff_variant(cfg, trials, StreamKey{kSeed, 0, 90});
    const double exact_upper = binomial_upper_tail(100, 70, 0.5);
    const double exact_lower = exact_upper; // symmetry: P{S <= 30} = P{S >= 70}
    const double se = std::sqrt(exact_upper * (1.0 - exact_upper) / trials);
    const bool oracle_ok =
        std::abs(rep.empirical_upper - exact_upper) <= 3.0 * se &&
        std::abs(rep.empirical_lower - exact_lower) <= 3.0 * se;
    pass = pass && oracle_ok;
    detail << "exact P{S>=70}=" << fmt(exact_upper)
           << " mc_upper=" << fmt(rep.empirical_upper)
           << " mc_lower=" << fmt(rep.empirical_lower);
    report(6, "tail bounds hold; binomial oracle agrees", pass, detail.str());
}

// --- criterion 7: manifest reproducibility --------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_7() {
    namespace c = rmab::cli;
    const fs::path base = fs::temp_directory_path() / "rmab_acceptance";
    fs::remove_all(base);

    bool pass = true;
    std::ostringstream detail;
    int run_no = 0;
    for (const char* command : {"regret", "simulate", "oracle-check", "chernoff-check"}) {
        c::ExperimentConfig cfg;
        cfg.command = command;
        cfg.p01 = 0.1;
        cfg.p11 = 0.9;
        cfg.horizon = 3000;
        cfg.reps = std::string(command) == "chernoff-check" ? 5000 : 10;
        if (std::string(command) == "oracle-check")
            cfg.reps = 5000;
        cfg.seed = kSeed;
        cfg.jobs = 1;
        cfg.out = (base / ("first_" + std::to_string(run_no))).string();
        const c::ResultBundle first = c::run_experiment(cfg);

        c::ExperimentConfig replay;
        c::load_config_file(first.manifest_path, replay);
        replay.out = (base / ("replay_" + std::to_string(run_no))).string();
        replay.jobs = 4; // must not change any byte
        const c::ResultBundle second = c::run_experiment(replay);

        for (std::size_t i = 0; i < first.csv_paths.size(); ++i) {
            if (slurp(first.csv_paths[i]) != slurp(second.csv_paths[i])) {
                pass = false;
                detail << command << " differs; ";
            }
        }
        ++run_no;
    }
    if (pass)
        detail << "4 commands byte-identical under manifest replay with jobs 1 vs 4";
    report(7, "manifest reproducibility", pass, detail.str());
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(8, "suite runtime <= 600 s", elapsed <= 600.0,
           fmt(elapsed) + " s elapsed");
    std::printf("%s: %d/8 criteria passed\n", g_failures == 0 ? "OK" : "FAILED",
                8 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
