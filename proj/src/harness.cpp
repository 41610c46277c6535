#include "omtest/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "omtest/analyzer.hpp"

namespace omtest {

namespace {

void check_open_prob(double v, const char* name) {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument(std::string(name) + " must be strictly between 0 and 1");
}

MarkerSet e1_label() {
    MarkerSet m;
    m.set_e(1);
    return m;
}

}  // namespace

LabeledMarkovChain gen_simple(double p, double q) {
    check_open_prob(p, "p");
    check_open_prob(q, "q");
    // 0 = start, 1 = mid, 2 = goal
    std::vector<std::vector<Transition>> rows(3);
    rows[0] = {{0, 1.0 - p}, {1, p}};
    rows[1] = {{1, 1.0 - q}, {2, q}};
    rows[2] = {{2, q}, {1, 1.0 - q}};
    std::vector<MarkerSet> obs(3);
    obs[2] = e1_label();
    return LabeledMarkovChain::marker_chain(3, 0, std::move(rows), 1, std::move(obs));
}

LabeledMarkovChain gen_ring(int m, double p, double q) {
    if (m < 1) throw std::invalid_argument("ring length must be >= 1");
    check_open_prob(p, "p");
    check_open_prob(q, "q");
    if (m == 1) {
        // 0 = start, 1 = sink, 2 = goal, 3 = detour
        std::vector<std::vector<Transition>> rows(4);
        rows[0] = {{1, 1.0 - q}, {2, q}};
        rows[1] = {{1, 1.0}};
        rows[2] = {{2, p}, {3, 1.0 - p}};
        rows[3] = {{2, 1.0}};
        std::vector<MarkerSet> obs(4);
        obs[2] = e1_label();
        return LabeledMarkovChain::marker_chain(4, 0, std::move(rows), 1, std::move(obs));
    }
    // 0 = start, 1 = sink, 2..m = ring positions 1..m-1, m+1 = detour, m+2 = goal
    int detour = m + 1, goal = m + 2;
    std::vector<std::vector<Transition>> rows(m + 3);
    rows[0] = {{1, 1.0 - q}, {2, q}};
    rows[1] = {{1, 1.0}};
    for (int i = 2; i < m; ++i) rows[i] = {{i + 1, 1.0}};
    rows[m] = {{goal, p}, {detour, 1.0 - p}};  // branch state, m-1 steps into the ring
    rows[detour] = {{2, 1.0}};
    rows[goal] = {{2, 1.0}};
    std::vector<MarkerSet> obs(m + 3);
    obs[goal] = e1_label();
    return LabeledMarkovChain::marker_chain(m + 3, 0, std::move(rows), 1, std::move(obs));
}

LabeledMarkovChain gen_ladder(int m, double p) {
    if (m < 1) throw std::invalid_argument("ladder length must be >= 1");
    check_open_prob(p, "p");
    // 0 = start, 1 = sink, 2..m = rungs 2..m, m+1 = goal
    int goal = m + 1;
    std::vector<std::vector<Transition>> rows(m + 2);
    std::vector<MarkerSet> obs(m + 2);
    for (int i = 0; i <= m; ++i) {
        if (i == 1) continue;
        int next = (i == m) ? goal : (i == 0 ? 2 : i + 1);
        if (m == 1) next = goal;
        rows[i] = {{1, 1.0 - p}, {next, p}};
        if (i >= 2) obs[i] = e1_label();
    }
    rows[1] = {{1, 1.0}};
    rows[goal] = {{goal, 1.0}};
    obs[goal] = e1_label();
    return LabeledMarkovChain::marker_chain(m + 2, 0, std::move(rows), 1, std::move(obs));
}

LabeledMarkovChain gen_path(long long b) {
    if (b < 1) throw std::invalid_argument("path parameter must be >= 1");
    long long n = 2 * b + 1;
    std::vector<std::vector<Transition>> rows(n);
    for (long long i = 0; i + 1 < n; ++i) rows[i] = {{static_cast<int>(i + 1), 1.0}};
    rows[n - 1] = {{static_cast<int>(n - 1), 1.0}};
    std::vector<MarkerSet> obs(n);
    obs[n - 1] = e1_label();
    return LabeledMarkovChain::marker_chain(static_cast<int>(n), 0, std::move(rows), 1,
                                            std::move(obs));
}

MajoritySystem::MajoritySystem(int na, int nb) : na_(na), nb_(nb) {
    if (na < 1 || nb < 1) throw std::invalid_argument("both opinions need at least one agent");
    if (na == nb) throw std::invalid_argument("tied populations have no majority to stabilize to");
    if (na + nb > 30) throw std::invalid_argument("population limited to 30 agents");
    majority_is_a_ = na > nb;
    reset();
}

MarkerSet MajoritySystem::reset() {
    counts_ = {static_cast<long long>(na_), static_cast<long long>(nb_), 0, 0};
    return observe();
}

MarkerSet MajoritySystem::observe() const {
    long long minority_support = majority_is_a_ ? counts_[1] + counts_[3] : counts_[0] + counts_[2];
    MarkerSet m;
    if (minority_support == 0)
        m.set_e(1);
    else
        m.set_f(1);
    return m;
}

MarkerSet MajoritySystem::step(Rng& rng) {
    long long n = agent_count();
    long long i = static_cast<long long>(rng() % static_cast<std::uint64_t>(n));
    long long j = static_cast<long long>(rng() % static_cast<std::uint64_t>(n - 1));
    if (j >= i) ++j;
    auto state_of = [&](long long agent) {
        long long cum = 0;
        for (int s = 0; s < 4; ++s) {
            cum += counts_[s];
            if (agent < cum) return s;
        }
        return 3;
    };
    int x = state_of(i), y = state_of(j);
    // A=0 B=1 a=2 b=3; initiator x, responder y.
    if ((x == 0 && y == 1) || (x == 1 && y == 0)) {
        --counts_[0];
        --counts_[1];
        ++counts_[2];
        ++counts_[3];
    } else if ((x == 0 && y == 3) || (x == 3 && y == 0)) {
        --counts_[3];
        ++counts_[2];
    } else if ((x == 1 && y == 2) || (x == 2 && y == 1)) {
        --counts_[2];
        ++counts_[3];
    } else if (x == 2 && y == 3) {
        --counts_[3];
        ++counts_[2];
    } else if (x == 3 && y == 2) {
        --counts_[2];
        ++counts_[3];
    }
    return observe();
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::GoodTail: return "goodTail";
        case Verdict::BadTail: return "badTail";
        default: return "inconclusive";
    }
}

StateClasses state_classes(const LabeledMarkovChain& chain, int k) {
    StateClasses out;
    out.of_state.assign(chain.state_count(), Verdict::Inconclusive);
    for (const auto& v : classify(chain, k)) {
        Verdict verdict = v.is_bad() ? Verdict::BadTail : Verdict::GoodTail;
        for (int s : v.states) out.of_state[s] = verdict;
    }
    return out;
}

TrialRecord run_trial(BlackBoxSystem& system, MarkerStrategy& strategy, int k,
                      const TrialLimits& limits, Rng& rng, const StateClasses* whitebox) {
    if (limits.quiet_threshold < 1 || limits.step_cap < 2 * limits.quiet_threshold)
        throw std::invalid_argument("step cap must be at least twice the quiet threshold");

    TrialRecord rec;
    long long total = 0;
    long long seg_len = 0;
    std::vector<long long> last_e(k, -1), last_f(k, -1);

    auto track = [&](const MarkerSet& obs, long long pos) {
        for (int i = 0; i < k; ++i) {
            if (obs.has_e(i + 1)) last_e[i] = pos;
            if (obs.has_f(i + 1)) last_f[i] = pos;
        }
    };
    // Implicit systems get the monitor's own acceptance window: the second
    // half of the quiet run. The literal full quiet window would always drag
    // in the pre-convergence prefix, since the trial stops the moment the
    // segment reaches the threshold.
    auto window_good = [&]() {
        long long half_start = (seg_len + 1) / 2;
        for (int i = 0; i < k; ++i)
            if (last_e[i] >= half_start && last_f[i] < half_start) return true;
        return false;
    };

    MarkerSet obs = system.reset();
    strategy.observe(obs);
    track(obs, 0);

    while (true) {
        if (seg_len >= limits.quiet_threshold) {
            // Converged: the tail has run quiet long enough.
            rec.truncated = false;
            if (whitebox && system.current_state())
                rec.verdict = whitebox->of_state[*system.current_state()];
            else
                rec.verdict = window_good() ? Verdict::GoodTail : Verdict::Inconclusive;
            break;
        }
        if (total >= limits.step_cap) {
            rec.truncated = true;
            rec.verdict = Verdict::Inconclusive;
            break;
        }
        obs = system.step(rng);
        ++total;
        ++seg_len;
        track(obs, seg_len);
        if (strategy.observe(obs) == Action::Restart) {
            ++rec.restarts;
            rec.steps_before_last_restart += seg_len;
            if (rec.segments.size() < 64) rec.segments.push_back(seg_len);
            obs = system.reset();
            strategy.observe(obs);
            seg_len = 0;
            std::fill(last_e.begin(), last_e.end(), -1);
            std::fill(last_f.begin(), last_f.end(), -1);
            track(obs, 0);
        }
    }
    return rec;
}

long long ExperimentResult::trials_with_at_least(long long restarts) const {
    long long count = 0;
    for (std::size_t r = 0; r < restart_hist.size(); ++r)
        if (static_cast<long long>(r) >= restarts) count += restart_hist[r];
    return count;
}

ExperimentResult run_experiment(const SystemFactory& make_system, const ExperimentConfig& config,
                                const StateClasses* whitebox) {
    if (config.trials < 1) throw std::invalid_argument("need at least one trial");
    ExperimentResult result;
    result.config = config;
    result.records.resize(config.trials);

    auto run_range = [&](long long begin, long long stride) {
        for (long long idx = begin; idx < config.trials; idx += stride) {
            Rng rng(derive_seed(config.base_seed, static_cast<std::uint64_t>(idx)));
            GrowthFunction growth =
                config.const_block ? const_growth(*config.const_block) : poly_growth(config.c);
            RestartStrategy strategy(config.k, growth);
            auto system = make_system();
            TrialRecord rec = run_trial(*system, strategy, config.k, config.limits, rng, whitebox);
            rec.seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(idx));
            result.records[idx] = std::move(rec);
        }
    };

    int jobs = std::max(1, config.jobs);
    if (jobs == 1 || config.trials == 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> workers;
        for (int w = 0; w < jobs; ++w) workers.emplace_back(run_range, w, jobs);
        for (auto& t : workers) t.join();
    }

    long long max_restarts = 0;
    double sum = 0.0;
    for (const auto& rec : result.records) {
        sum += static_cast<double>(rec.steps_before_last_restart);
        max_restarts = std::max(max_restarts, rec.restarts);
    }
    result.mean_s = sum / static_cast<double>(config.trials);
    double var = 0.0;
    for (const auto& rec : result.records) {
        double d = static_cast<double>(rec.steps_before_last_restart) - result.mean_s;
        var += d * d;
    }
    if (config.trials > 1) var /= static_cast<double>(config.trials - 1);
    result.stderr_s = std::sqrt(var / static_cast<double>(config.trials));
    result.ci99_half = 2.576 * result.stderr_s;
    result.restart_hist.assign(max_restarts + 1, 0);
    for (const auto& rec : result.records) ++result.restart_hist[rec.restarts];
    return result;
}

ExperimentResult run_experiment(const LabeledMarkovChain& chain, const ExperimentConfig& config) {
    if (!chain.marker_labeled())
        throw std::invalid_argument("experiments need a marker-labeled chain (or a product)");
    ExperimentConfig cfg = config;
    cfg.k = chain.marker_count();
    StateClasses classes = state_classes(chain, cfg.k);
    auto factory = [&chain]() -> std::unique_ptr<BlackBoxSystem> {
        return std::make_unique<ChainSession>(chain);
    };
    return run_experiment(factory, cfg, &classes);
}

std::string experiment_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "family,params,c,seed,trial,S,restarts,truncated,verdict\n";
    std::string c_label = result.config.const_block
                              ? "const" + std::to_string(*result.config.const_block)
                              : std::to_string(result.config.c);
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const auto& rec = result.records[i];
        out << result.config.family << "," << result.config.params << "," << c_label << ","
            << rec.seed << "," << i << "," << rec.steps_before_last_restart << "," << rec.restarts
            << "," << (rec.truncated ? 1 : 0) << "," << verdict_name(rec.verdict) << "\n";
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "SUMMARY,%.10g,%.10g,%.10g\n", result.mean_s, result.stderr_s,
                  result.ci99_half);
    out << buf;
    return out.str();
}

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("need at least 3 points");
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::invalid_argument("log-log regression needs positive coordinates");
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double num = 0.0, den = 0.0;
    for (auto [x, y] : points) {
        double dx = std::log(x) - mx;
        num += dx * (std::log(y) - my);
        den += dx * dx;
    }
    if (den == 0.0) throw std::invalid_argument("all x coordinates coincide");
    return num / den;
}

}  // namespace omtest
