#include "rmab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "rmab/analysis.hpp"
#include "rmab/channel.hpp"
#include "rmab/meta.hpp"
#include "rmab/policy.hpp"

namespace rmab::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join_longs(const std::vector<long>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(xs[i]);
    }
    return s;
}

std::vector<long> parse_longs(const std::string& s, const std::string& field) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stol(tok));
        } catch (const std::exception&) {
            throw ConfigError(field, "not an integer list: " + s);
        }
    }
    return out;
}

BlockSchedule parse_schedule(const std::string& s) {
    BlockSchedule sched;
    if (s == "log") {
        sched.rule = BlockSchedule::Rule::CeilLog;
    } else if (s == "sqrt") {
        sched.rule = BlockSchedule::Rule::CeilSqrt;
    } else if (s == "linear") {
        sched.rule = BlockSchedule::Rule::Linear;
    } else if (s.rfind("const:", 0) == 0) {
        sched.rule = BlockSchedule::Rule::Constant;
        try {
            sched.constant = std::stoi(s.substr(6));
        } catch (const std::exception&) {
            throw ConfigError("schedule", "bad constant in: " + s);
        }
        if (sched.constant < 1)
            throw ConfigError("schedule", "constant block length must be >= 1");
    } else {
        throw ConfigError("schedule",
                          "unknown rule '" + s + "' (use const:c|log|sqrt|linear)");
    }
    return sched;
}

BeliefVector parse_belief(const ExperimentConfig& cfg, const TransitionMatrix& p) {
    if (cfg.belief == "stationary") {
        const StationaryResult s = stationary_probability(p);
        if (!s.ergodic)
            throw ConfigError("belief",
                              "non-ergodic P (p01=0, p11=1) needs an explicit belief list");
        return BeliefVector(static_cast<std::size_t>(cfg.channels), s.probability);
    }
    BeliefVector omega;
    std::stringstream ss(cfg.belief);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            omega.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("belief", "not a probability list: " + cfg.belief);
        }
    }
    if (static_cast<int>(omega.size()) != cfg.channels)
        throw ConfigError("belief", "expected " + std::to_string(cfg.channels) +
                                        " entries, got " + std::to_string(omega.size()));
    for (double w : omega)
        if (!(w >= 0.0 && w <= 1.0))
            throw ConfigError("belief", "entry outside [0,1]");
    return omega;
}

void validate_common(const ExperimentConfig& cfg) {
    static const std::vector<std::string> commands = {
        "simulate", "regret", "profile", "oracle-check", "chernoff-check"};
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
        throw ConfigError("command", "unknown command '" + cfg.command + "'");
    if (!(cfg.p01 >= 0.0 && cfg.p01 <= 1.0))
        throw ConfigError("p01", "outside [0,1]");
    if (!(cfg.p11 >= 0.0 && cfg.p11 <= 1.0))
        throw ConfigError("p11", "outside [0,1]");
    if (cfg.channels < 2)
        throw ConfigError("channels", "need at least 2 channels");
    if (cfg.horizon < 1)
        throw ConfigError("horizon", "must be >= 1");
    if (cfg.reps < 1)
        throw ConfigError("reps", "must be >= 1");
    if (cfg.jobs < 1)
        throw ConfigError("jobs", "must be >= 1");
    parse_schedule(cfg.schedule);
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_)
            throw std::runtime_error("cannot open for writing: " + path.string());
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    fs::path finish() {
        out_.flush();
        if (!out_)
            throw std::runtime_error("write failed: " + path_.string());
        return path_;
    }

private:
    fs::path path_;
    std::ofstream out_;
};

std::map<std::string, std::string> manifest_entries(const ExperimentConfig& cfg) {
    return {
        {"artifact_version", artifact_version},
        {"command", cfg.command},
        {"p01", fmt12(cfg.p01)},
        {"p11", fmt12(cfg.p11)},
        {"channels", std::to_string(cfg.channels)},
        {"schedule", cfg.schedule},
        {"horizon", std::to_string(cfg.horizon)},
        {"checkpoints", join_longs(cfg.checkpoints)},
        {"reps", std::to_string(cfg.reps)},
        {"seed", std::to_string(cfg.seed)},
        {"belief", cfg.belief},
        {"out", cfg.out},
        {"jobs", std::to_string(cfg.jobs)},
        {"burnin", std::to_string(cfg.burnin)},
        {"oracle_length", std::to_string(cfg.oracle_length)},
        {"mu", fmt12(cfg.mu)},
        {"cdrift", fmt12(cfg.cdrift)},
        {"brange", fmt12(cfg.brange)},
        {"nlen", std::to_string(cfg.nlen)},
        {"aoffset", fmt12(cfg.aoffset)},
        {"generator", cfg.generator},
    };
}

fs::path write_manifest(const ExperimentConfig& cfg, const fs::path& dir) {
    const fs::path path = dir / "manifest.txt";
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    for (const auto& [k, v] : manifest_entries(cfg))
        out << k << '=' << v << '\n';
    return path;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "command") cfg.command = value;
        else if (key == "p01") cfg.p01 = std::stod(value);
        else if (key == "p11") cfg.p11 = std::stod(value);
        else if (key == "channels") cfg.channels = std::stoi(value);
        else if (key == "schedule") cfg.schedule = value;
        else if (key == "horizon") cfg.horizon = std::stol(value);
        else if (key == "checkpoints") cfg.checkpoints = parse_longs(value, "checkpoints");
        else if (key == "reps") cfg.reps = std::stol(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "belief") cfg.belief = value;
        else if (key == "out") cfg.out = value;
        else if (key == "jobs") cfg.jobs = std::stoi(value);
        else if (key == "burnin") cfg.burnin = std::stol(value);
        else if (key == "oracle_length") cfg.oracle_length = std::stoi(value);
        else if (key == "mu") cfg.mu = std::stod(value);
        else if (key == "cdrift") cfg.cdrift = std::stod(value);
        else if (key == "brange") cfg.brange = std::stod(value);
        else if (key == "nlen") cfg.nlen = std::stol(value);
        else if (key == "aoffset") cfg.aoffset = std::stod(value);
        else if (key == "generator") cfg.generator = value;
        else if (key == "artifact_version") { /* informational */ }
        else throw ConfigError(key, "unknown configuration key");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(key, "cannot parse value '" + value + "'");
    }
}

// ----- command implementations ------------------------------------------

ResultBundle run_simulate(const ExperimentConfig& cfg, const fs::path& dir) {
    const TransitionMatrix p{cfg.p01, cfg.p11};
    const BlockSchedule sched = parse_schedule(cfg.schedule);
    if (cfg.horizon < block_length(1, sched) + block_length(2, sched))
        throw ConfigError("horizon", "smaller than K1 + K2");
    const BeliefVector omega = parse_belief(cfg, p);
    const PolicyKind genie = genie_policy(p);

    CsvWriter csv(dir / "blocks.csv");
    csv.row({"rep", "block_index", "policy", "block_length", "sample_mean", "n_end", "T_n"});
    double total_reward = 0.0;
    long total_slots = 0;
    for (long r = 0; r < cfg.reps; ++r) {
        const Trajectory traj = run_meta_policy(
            p, cfg.channels, sched, static_cast<int>(cfg.horizon), omega,
            StreamKey{cfg.seed, static_cast<std::uint64_t>(r), 0});
        const auto subopt = extract_suboptimal_counts(traj, genie);
        for (std::size_t b = 0; b < traj.blocks.size(); ++b) {
            const BlockRecord& blk = traj.blocks[b];
            csv.row({std::to_string(r), std::to_string(blk.index),
                     blk.policy == PolicyKind::Pi1 ? "pi1" : "pi2",
                     std::to_string(blk.length), fmt12(blk.sample_mean),
                     std::to_string(blk.n_end), std::to_string(subopt[b].second)});
            total_reward += blk.sample_mean * blk.length;
        }
        total_slots += traj.final_state.total_slots;
    }

    ResultBundle bundle;
    bundle.csv_paths.push_back(csv.finish());
    std::ostringstream sum;
    sum << "simulate: reps=" << cfg.reps << " slots_per_rep=" << total_slots / cfg.reps
        << " mean_per_slot_reward=" << fmt12(total_reward / static_cast<double>(total_slots))
        << " genie=" << (genie == PolicyKind::Pi1 ? "pi1" : "pi2") << '\n';
    bundle.summary = sum.str();
    return bundle;
}

std::vector<long> default_checkpoints(const BlockSchedule& sched, long horizon) {
    const std::vector<long> bounds = block_boundaries(sched, horizon);
    std::vector<long> out;
    // ~20 log-spaced targets snapped to block boundaries
    const double lo = std::log(static_cast<double>(bounds.front()));
    const double hi = std::log(static_cast<double>(bounds.back()));
    for (int k = 0; k < 20; ++k) {
        const double target = std::exp(lo + (hi - lo) * k / 19.0);
        long best = bounds.front();
        for (long b : bounds)
            if (std::abs(static_cast<double>(b) - target) <
                std::abs(static_cast<double>(best) - target))
                best = b;
        if (out.empty() || out.back() != best)
            out.push_back(best);
    }
    return out;
}

ResultBundle run_regret(ExperimentConfig cfg, const fs::path& dir,
                        ExperimentConfig& resolved) {
    const TransitionMatrix p{cfg.p01, cfg.p11};
    const BlockSchedule sched = parse_schedule(cfg.schedule);
    if (cfg.horizon < block_length(1, sched) + block_length(2, sched))
        throw ConfigError("horizon", "smaller than K1 + K2");
    const BeliefVector omega = parse_belief(cfg, p);

    if (cfg.checkpoints.empty())
        cfg.checkpoints = default_checkpoints(sched, cfg.horizon);
    resolved.checkpoints = cfg.checkpoints; // pinned in the manifest
    {
        const std::vector<long> bounds = block_boundaries(sched, cfg.horizon);
        for (long c : cfg.checkpoints)
            if (!std::binary_search(bounds.begin(), bounds.end(), c))
                throw ConfigError("checkpoints", std::to_string(c) +
                                                     " is not a block boundary");
    }

    RegretSeries series;
    try {
        series = regret_curve(p, cfg.channels, sched, static_cast<int>(cfg.horizon),
                              cfg.checkpoints, cfg.reps, omega,
                              StreamKey{cfg.seed, 0, 0}, cfg.jobs);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("checkpoints", e.what());
    }

    CsvWriter csv(dir / "regret.csv");
    csv.row({"n", "G_n", "ln_n", "genie_mean", "meta_mean", "regret",
             "regret_halfwidth", "regret_over_Gn_ln_n", "T_n_mean"});
    for (const RegretPoint& pt : series.checkpoints) {
        const long gn = g_of_n(pt.n, sched);
        const double ln_n = std::log(static_cast<double>(pt.n));
        const std::string norm =
            ln_n == 0.0 ? "" : fmt12(pt.regret / (static_cast<double>(gn) * ln_n));
        csv.row({std::to_string(pt.n), std::to_string(gn), fmt12(ln_n),
                 fmt12(pt.genie_mean), fmt12(pt.meta_mean), fmt12(pt.regret),
                 fmt12(pt.regret_halfwidth), norm, fmt12(pt.t_n_mean)});
    }

    ResultBundle bundle;
    bundle.csv_paths.push_back(csv.finish());
    const RegretPoint& last = series.checkpoints.back();
    std::ostringstream sum;
    sum << "regret: genie=" << (series.genie == PolicyKind::Pi1 ? "pi1" : "pi2")
        << " reps=" << series.replication_count << " final_n=" << last.n
        << " regret=" << fmt12(last.regret) << " +/- " << fmt12(last.regret_halfwidth)
        << " T_n_mean=" << fmt12(last.t_n_mean) << '\n';
    bundle.summary = sum.str();
    return bundle;
}

ResultBundle run_profile(const ExperimentConfig& cfg, const fs::path& dir) {
    const TransitionMatrix p{cfg.p01, cfg.p11};
    const BeliefVector omega = parse_belief(cfg, p);
    const long burnin = cfg.burnin < 0 ? cfg.horizon / 10 : cfg.burnin;
    if (burnin >= cfg.horizon)
        throw ConfigError("burnin", "must be smaller than horizon");

    const std::vector<BeliefVector> belief_grid = {
        BeliefVector(static_cast<std::size_t>(cfg.channels), 0.0),
        BeliefVector(static_cast<std::size_t>(cfg.channels), 1.0), omega};
    const std::vector<int> l_grid = {10, 100, 1000};

    CsvWriter csv(dir / "profile.csv");
    csv.row({"policy", "u_estimate", "u_halfwidth", "transient_bound_estimate"});
    std::ostringstream sum;
    for (PolicyKind kind : {PolicyKind::Pi1, PolicyKind::Pi2}) {
        PolicyProfile prof = estimate_steady_reward(
            p, kind, cfg.channels, static_cast<int>(cfg.horizon),
            static_cast<int>(burnin), cfg.reps,
            StreamKey{cfg.seed, 0, static_cast<std::uint64_t>(kind)}, cfg.jobs, omega);
        const TransientBoundReport tr = estimate_transient_bound(
            p, kind, belief_grid, l_grid, cfg.reps,
            StreamKey{cfg.seed, 0, 100 + static_cast<std::uint64_t>(kind)},
            prof.u_estimate, cfg.jobs);
        prof.transient_bound_estimate = tr.max_abs_deviation;
        const std::string name = kind == PolicyKind::Pi1 ? "pi1" : "pi2";
        csv.row({name, fmt12(prof.u_estimate), fmt12(prof.u_halfwidth),
                 fmt12(prof.transient_bound_estimate)});
        sum << "profile: " << name << " U=" << fmt12(prof.u_estimate) << " +/- "
            << fmt12(prof.u_halfwidth) << " C_hat=" << fmt12(prof.transient_bound_estimate)
            << '\n';
    }
    ResultBundle bundle;
    bundle.csv_paths.push_back(csv.finish());
    bundle.summary = sum.str();
    return bundle;
}

ResultBundle run_oracle_check(const ExperimentConfig& cfg, const fs::path& dir) {
    const TransitionMatrix p{cfg.p01, cfg.p11};
    if (cfg.channels > 3)
        throw ConfigError("channels", "oracle-check needs at most 3 channels");
    if (cfg.oracle_length < 1 || cfg.oracle_length > 20)
        throw ConfigError("oracle_length", "must be in [1, 20]");
    const BeliefVector omega = parse_belief(cfg, p);
    const int L = cfg.oracle_length;

    CsvWriter csv(dir / "oracle.csv");
    csv.row({"policy", "exact", "mc_mean", "mc_se", "z_score", "pass"});
    bool all_pass = true;
    std::ostringstream sum;
    for (PolicyKind kind : {PolicyKind::Pi1, PolicyKind::Pi2}) {
        const double exact = exact_expected_reward(p, kind, omega, L);
        std::vector<double> sums(static_cast<std::size_t>(cfg.reps));
        const StreamKey base{cfg.seed, 0, static_cast<std::uint64_t>(kind)};
        for (long r = 0; r < cfg.reps; ++r) {
            const ChannelStateMatrix states = generate_states(
                p, cfg.channels, L, omega,
                base.with_replication(static_cast<std::uint64_t>(r)));
            sums[static_cast<std::size_t>(r)] =
                static_cast<double>(run_policy(kind, p, states, 0, L, omega).reward_sum);
        }
        const ConfidenceValue cv = mean_with_halfwidth(sums);
        const double se = cv.halfwidth / 1.96;
        const double z = se > 0.0 ? std::abs(cv.mean - exact) / se
                                  : (cv.mean == exact ? 0.0 : HUGE_VAL);
        const bool pass = z <= 3.0;
        all_pass = all_pass && pass;
        const std::string name = kind == PolicyKind::Pi1 ? "pi1" : "pi2";
        csv.row({name, fmt12(exact), fmt12(cv.mean), fmt12(se), fmt12(z),
                 pass ? "1" : "0"});
        sum << "oracle-check: " << name << " exact=" << fmt12(exact)
            << " mc=" << fmt12(cv.mean) << " z=" << fmt12(z)
            << (pass ? " PASS" : " FAIL") << '\n';
    }
    ResultBundle bundle;
    bundle.csv_paths.push_back(csv.finish());
    bundle.summary = sum.str();
    bundle.exit_code = all_pass ? 0 : 3;
    return bundle;
}

ResultBundle run_chernoff_check(const ExperimentConfig& cfg, const fs::path& dir) {
    std::vector<LemmaOneGenerator> gens;
    if (cfg.generator == "const" || cfg.generator == "both")
        gens.push_back(LemmaOneGenerator::ConstantBernoulli);
    if (cfg.generator == "drift" || cfg.generator == "both")
        gens.push_back(LemmaOneGenerator::AdversarialDrift);
    if (gens.empty())
        throw ConfigError("generator", "unknown generator '" + cfg.generator +
                                           "' (use const|drift|both)");

    CsvWriter csv(dir / "chernoff.csv");
    csv.row({"generator", "mu", "c_drift", "b_range", "n", "a", "bound_upper",
             "bound_lower", "empirical_upper", "empirical_lower", "upper_pass",
             "lower_pass"});
    bool all_pass = true;
    std::ostringstream sum;
    for (LemmaOneGenerator g : gens) {
        LemmaOneConfig lc{cfg.mu, cfg.cdrift, cfg.brange, cfg.nlen, cfg.aoffset, g};
        try {
            validate(lc);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("mu", e.what());
        }
        const std::uint64_t gen_tag = g == LemmaOneGenerator::ConstantBernoulli ? 0 : 1;
        const ChernoffReport rep = verify_chernoff_variant(
            lc, cfg.reps, StreamKey{cfg.seed, 0, 1000 + gen_tag}, cfg.jobs);
        const std::string name =
            g == LemmaOneGenerator::ConstantBernoulli ? "const" : "drift";
        csv.row({name, fmt12(lc.mu), fmt12(lc.c_drift), fmt12(lc.b_range),
                 std::to_string(lc.n_len), fmt12(lc.a_offset),
                 fmt12(rep.bounds.upper_tail), fmt12(rep.bounds.lower_tail),
                 fmt12(rep.empirical_upper), fmt12(rep.empirical_lower),
                 rep.upper_pass ? "1" : "0", rep.lower_pass ? "1" : "0"});
        all_pass = all_pass && rep.upper_pass && rep.lower_pass;
        sum << "chernoff-check: " << name << " upper " << fmt12(rep.empirical_upper)
            << " <= " << fmt12(rep.bounds.upper_tail)
            << (rep.upper_pass ? " PASS" : " FAIL") << "; lower "
            << fmt12(rep.empirical_lower) << " <= " << fmt12(rep.bounds.lower_tail)
            << (rep.lower_pass ? " PASS" : " FAIL") << '\n';
    }
    ResultBundle bundle;
    bundle.csv_paths.push_back(csv.finish());
    bundle.summary = sum.str();
    bundle.exit_code = all_pass ? 0 : 3;
    return bundle;
}

} // namespace

void load_config_file(const fs::path& path, ExperimentConfig& config) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot read " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "expected key=value, got: " + line);
        apply_key(config, line.substr(0, eq), line.substr(eq + 1));
    }
}

bool parse_command_line(int argc, const char* const* argv, ExperimentConfig& config) {
    if (const char* env = std::getenv("RMAB_LAB_SEED")) {
        try {
            config.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("seed", std::string("bad RMAB_LAB_SEED: ") + env);
        }
    }

    // The config file (often a previous run's manifest) is applied
    // first so that explicit flags win.
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--config")
            load_config_file(argv[i + 1], config);

    CLI::App app{"rmab_lab: restless-bandit meta-policy experiment runner"};
    std::string command = config.command;
    std::string checkpoints_str;
    std::string config_path;
    app.add_option("command", command,
                   "simulate | regret | profile | oracle-check | chernoff-check");
    app.add_option("--config", config_path, "key=value config or manifest file");
    app.add_option("--p01", config.p01, "0->1 transition probability");
    app.add_option("--p11", config.p11, "1->1 transition probability");
    app.add_option("--channels", config.channels, "number of channels N");
    app.add_option("--schedule", config.schedule, "const:c|log|sqrt|linear");
    app.add_option("--horizon", config.horizon, "slots per replication");
    app.add_option("--checkpoints", checkpoints_str, "comma list of block boundaries");
    app.add_option("--reps", config.reps, "replications (trials for chernoff-check)");
    app.add_option("--seed", config.seed, "master seed (default $RMAB_LAB_SEED)");
    app.add_option("--belief", config.belief, "stationary | w1,w2,...");
    app.add_option("--out", config.out, "output directory");
    app.add_option("--jobs", config.jobs, "parallel replication workers");
    app.add_option("--burnin", config.burnin, "profile: slots discarded per rep");
    app.add_option("--oracle-length", config.oracle_length, "oracle-check horizon L");
    app.add_option("--mu", config.mu, "chernoff-check mean");
    app.add_option("--cdrift", config.cdrift, "chernoff-check drift C");
    app.add_option("--brange", config.brange, "chernoff-check range b");
    app.add_option("--nlen", config.nlen, "chernoff-check sequence length n");
    app.add_option("--aoffset", config.aoffset, "chernoff-check offset a");
    app.add_option("--generator", config.generator, "const|drift|both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return false;
    } catch (const CLI::ParseError& e) {
        throw ConfigError("command-line", e.what());
    }
    if (!command.empty())
        config.command = command;
    if (!checkpoints_str.empty())
        config.checkpoints = parse_longs(checkpoints_str, "checkpoints");
    if (config.command.empty())
        throw ConfigError("command", "no command given (and none in --config)");
    return true;
}

ResultBundle run_experiment(const ExperimentConfig& config) {
    validate_common(config);
    const fs::path dir(config.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory: " + dir.string());

    ExperimentConfig resolved = config;
    ResultBundle bundle;
    if (config.command == "simulate")
        bundle = run_simulate(config, dir);
    else if (config.command == "regret")
        bundle = run_regret(config, dir, resolved);
    else if (config.command == "profile")
        bundle = run_profile(config, dir);
    else if (config.command == "oracle-check")
        bundle = run_oracle_check(config, dir);
    else
        bundle = run_chernoff_check(config, dir);

    bundle.manifest_path = write_manifest(resolved, dir);
    std::ofstream summary(dir / "summary.txt", std::ios::binary);
    summary << bundle.summary;
    return bundle;
}

} // namespace rmab::cli
