// Acceptance suite: one self-contained check per criterion, one PASS/FAIL
// line each. Run with no arguments for the full set, or pass criterion
// numbers to run a subset. Exit status 0 iff every executed check passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "omtest/analyzer.hpp"
#include "omtest/bounds.hpp"
#include "omtest/brute_force.hpp"
#include "omtest/harness.hpp"
#include "omtest/model.hpp"
#include "omtest/rabin.hpp"
#include "omtest/strategy.hpp"
#include "support/random_models.hpp"
#include "support/reference_strategy.hpp"

using namespace omtest;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. Polynomial growth finds the good tail on the three-state chain.
Outcome criterion_1() {
    auto start = std::chrono::steady_clock::now();
    ExperimentConfig config;
    config.family = "simple";
    config.c = 2;
    config.trials = 300;
    config.limits.step_cap = 1'000'000;
    config.limits.quiet_threshold = 10'000;
    config.base_seed = 1001;
    auto result = run_experiment(gen_simple(0.5, 0.5), config);
    long long good = 0;
    for (const auto& rec : result.records)
        if (!rec.truncated && rec.verdict == Verdict::GoodTail) ++good;
    double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << good << "/300 good tails, " << elapsed << " s";
    return {good >= 297 && elapsed < 120.0, detail.str()};
}

// 2. Bounded block sizes keep restarting on the 5-state path. Stated for the
// path with the witness at position 2b; the monitor keeps that run because
// the witness lands exactly on the first block boundary, inside the second
// half, so this check documents the discrepancy rather than hiding it.
Outcome criterion_2() {
    ExperimentConfig config;
    config.family = "path";
    config.const_block = 2;
    config.trials = 20;
    config.limits.step_cap = 100'000;
    config.limits.quiet_threshold = 10'000;
    config.base_seed = 1002;
    auto result = run_experiment(gen_path(2), config);
    long long truncated = 0, deep = 0;
    for (const auto& rec : result.records) {
        if (rec.truncated) ++truncated;
        if (rec.restarts >= 10'000) ++deep;
    }
    std::ostringstream detail;
    detail << truncated << "/20 truncated, " << deep
           << "/20 with >= 10^4 restarts; the 5-state path reaches its witness exactly at the "
              "first block boundary, so the monitor keeps the run (a 7-state path restarts "
              "forever, see the companion check)";
    return {truncated == 20 && deep == 20, detail.str()};
}

// 3. Per-segment restart frequencies sit below the analytic bound. The bound
// with block parameter f(n) applies to the segment run after n restarts, so
// the empirical quantity paired with it is P[restarts > n | restarts >= n].
Outcome criterion_3() {
    auto chain = gen_simple(0.5, 0.5);
    auto profile = progress_profile(chain, 1);
    ExperimentConfig config;
    config.family = "simple";
    config.c = 2;
    config.trials = 5000;
    config.limits.step_cap = 1'000'000;
    config.limits.quiet_threshold = 10'000;
    config.base_seed = 1003;
    auto result = run_experiment(chain, config);
    GrowthFunction f = poly_growth(2);
    bool ok = true;
    std::ostringstream detail;
    int tested = 0;
    for (long long n = 0;; ++n) {
        long long m = result.trials_with_at_least(n);
        if (m == 0) break;
        double bound = restart_bound(n, f, profile.R_m, profile.P_m, profile.P_good);
        if (bound >= 1.0) continue;
        double shown = static_cast<double>(result.trials_with_at_least(n + 1));
        double freq = shown / static_cast<double>(m);
        double se = std::sqrt(bound * (1.0 - bound) / static_cast<double>(m));
        ++tested;
        detail << "n=" << n << ": " << freq << " vs " << bound + 3.0 * se << " (m=" << m << "); ";
        if (freq > bound + 3.0 * se) ok = false;
    }
    detail << tested << " segment indices checked";
    return {ok && tested >= 2, detail.str()};
}

// 4. Analyzer matches the exhaustive oracle on random chains.
Outcome criterion_4() {
    auto start = std::chrono::steady_clock::now();
    int done = 0, skipped = 0;
    std::uint64_t seed = 0;
    while (done < 100) {
        if (skipped > 300) return {false, "oracle kept hitting its horizon"};
        Rng rng(derive_seed(77, seed++));
        auto chain = testing::random_marker_chain(rng, 8, 1 + testing::pick(rng, 2));
        ProgressProfile slow;
        try {
            slow = brute_force_profile(chain, chain.marker_count(), 12);
        } catch (const InconclusiveError&) {
            ++skipped;
            continue;
        }
        auto fast = progress_profile(chain, chain.marker_count());
        auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
        auto same_radius = [](const std::optional<long long>& a,
                              const std::optional<long long>& b) { return a == b; };
        auto same_prob = [&](const std::optional<double>& a, const std::optional<double>& b) {
            if (a.has_value() != b.has_value()) return false;
            return !a || close(*a, *b);
        };
        bool match = same_radius(fast.r_gamma, slow.r_gamma) &&
                     same_radius(fast.R_gamma, slow.R_gamma) &&
                     same_radius(fast.r_beta, slow.r_beta) &&
                     same_radius(fast.R_beta, slow.R_beta) &&
                     same_prob(fast.p_gamma, slow.p_gamma) &&
                     same_prob(fast.P_gamma, slow.P_gamma) &&
                     same_prob(fast.p_beta, slow.p_beta) &&
                     same_prob(fast.P_beta, slow.P_beta) && fast.R_m == slow.R_m &&
                     close(fast.P_m, slow.P_m) && close(fast.P_good, slow.P_good);
        if (!match) {
            std::ostringstream detail;
            detail << "mismatch on generated chain " << seed - 1;
            return {false, detail.str()};
        }
        ++done;
    }
    double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "100 chains matched (" << skipped << " regenerated), " << elapsed << " s";
    return {elapsed < 30.0, detail.str()};
}

// 5. The automaton reduction: lifted traces equal product traces, and the
// product's reach probability equals the brute-force acceptance probability.
Outcome criterion_5() {
    std::vector<std::string> alphabet{"a", "b"};
    for (std::uint64_t instance = 0; instance < 50; ++instance) {
        Rng setup(derive_seed(505, instance));
        auto chain = testing::random_raw_chain(setup, 6, alphabet);
        auto dra = testing::random_dra(setup, 3, 1 + testing::pick(setup, 2), alphabet);
        auto prod = product(chain, dra);
        std::vector<int> dra_sym(chain.symbol_count());
        for (int i = 0; i < chain.symbol_count(); ++i)
            dra_sym[i] = *dra.symbol_id(chain.symbol_name(i));

        double via_analyzer = reach_prob_good(prod, prod.marker_count());
        auto naive = testing::naive_product(chain, dra);
        double via_brute = brute_force_reach_good(naive, naive.marker_count());
        if (std::abs(via_analyzer - via_brute) > 1e-9) {
            std::ostringstream detail;
            detail << "instance " << instance << ": P_good " << via_analyzer << " vs brute force "
                   << via_brute;
            return {false, detail.str()};
        }

        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            RestartStrategy inner_raw(dra.pair_count(), poly_growth(2));
            RestartStrategy inner_prod(dra.pair_count(), poly_growth(2));
            LiftedStrategy lift(dra, inner_raw);
            RawSession raw(chain);
            ChainSession prod_session(prod);
            Rng rng_raw(derive_seed(instance * 100, seed));
            Rng rng_prod(derive_seed(instance * 100, seed));
            int raw_sym = raw.reset();
            MarkerSet prod_obs = prod_session.reset();
            Action a1 = lift.observe(dra_sym[raw_sym]);
            Action a2 = inner_prod.observe(prod_obs);
            if (lift.last_fed() != prod_obs || a1 != a2)
                return {false, "trace mismatch at position 0"};
            for (int step = 0; step < 250; ++step) {
                raw_sym = raw.step(rng_raw);
                prod_obs = prod_session.step(rng_prod);
                a1 = lift.observe(dra_sym[raw_sym]);
                a2 = inner_prod.observe(prod_obs);
                if (lift.last_fed() != prod_obs || a1 != a2) {
                    std::ostringstream detail;
                    detail << "trace mismatch, instance " << instance << " seed " << seed
                           << " step " << step;
                    return {false, detail.str()};
                }
                if (a1 == Action::Restart) {
                    raw_sym = raw.reset();
                    prod_obs = prod_session.reset();
                    a1 = lift.observe(dra_sym[raw_sym]);
                    a2 = inner_prod.observe(prod_obs);
                    if (lift.last_fed() != prod_obs || a1 != a2)
                        return {false, "trace mismatch after restart"};
                }
            }
        }
    }
    return {true, "50 instances x 20 seeds, traces identical, probabilities within 1e-9"};
}

// 6. Log-log scaling of the mean steps against Rm/Pm on the ring family.
// Shared helper so the companion run at larger ring sizes uses the same
// protocol.
Outcome scaling_slopes(const std::vector<int>& ms) {
    std::ostringstream detail;
    double slope_c1 = 0.0, slope_c3 = 0.0;
    bool ok = true;
    for (int c : {1, 2, 3}) {
        std::vector<std::pair<double, double>> points;
        for (int m : ms) {
            auto chain = gen_ring(m, 0.5, 0.5);
            auto profile = progress_profile(chain, 1);
            ExperimentConfig config;
            config.family = "ring";
            config.c = c;
            config.trials = 300;
            config.limits.step_cap = 1'000'000;
            config.limits.quiet_threshold = 10'000;
            config.base_seed = 600 + static_cast<std::uint64_t>(c) * 31 + m;
            auto result = run_experiment(chain, config);
            double x = static_cast<double>(profile.R_m) / profile.P_m;
            points.emplace_back(x, std::max(result.mean_s, 1e-9));
        }
        double slope = loglog_slope(points);
        double lo = 0.8, hi = 1.0 + 1.0 / c + 0.6;
        detail << "c=" << c << ": slope " << slope << " in [" << lo << "," << hi << "]; ";
        if (!(slope >= lo && slope <= hi)) ok = false;
        if (c == 1) slope_c1 = slope;
        if (c == 3) slope_c3 = slope;
    }
    detail << "slope(c=3) < slope(c=1): " << (slope_c3 < slope_c1 ? "yes" : "no");
    return {ok && slope_c3 < slope_c1, detail.str()};
}

Outcome criterion_6() {
    Outcome outcome = scaling_slopes({2, 4, 8, 16});
    if (!outcome.pass)
        outcome.detail +=
            "; at these ring sizes the mean is still dominated by the heavy-tailed cost of the "
            "last failed segments, so the asymptotic exponent has not surfaced yet (see the "
            "companion run at larger sizes)";
    return outcome;
}

// Companion to criterion 6: same protocol, ring sizes where the polynomial
// regime is visible.
void companion_check_for_6() {
    Outcome outcome = scaling_slopes({32, 64, 128, 256});
    std::printf("          companion: sizes {32,64,128,256}: %s - %s\n",
                outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
}

// 7. The closed-form total bound dominates the 99% CI upper end of mean S.
Outcome criterion_7() {
    struct Case {
        std::string name;
        LabeledMarkovChain chain;
    };
    std::vector<Case> cases;
    for (int m : {2, 4}) cases.push_back({"ring m=" + std::to_string(m), gen_ring(m, 0.5, 0.5)});
    for (int m : {2, 3})
        cases.push_back({"ladder m=" + std::to_string(m), gen_ladder(m, 0.5)});
    bool ok = true;
    std::ostringstream detail;
    for (const auto& [name, chain] : cases) {
        auto profile = progress_profile(chain, 1);
        for (int c : {1, 2}) {
            ExperimentConfig config;
            config.family = name;
            config.c = c;
            config.trials = 300;
            config.limits.step_cap = 1'000'000;
            config.limits.quiet_threshold = 10'000;
            config.base_seed = 700 + static_cast<std::uint64_t>(c);
            auto result = run_experiment(chain, config);
            BoundInputs in;
            in.rm = profile.R_m;
            in.pm = profile.P_m;
            in.pgamma = profile.P_gamma.value_or(0.0);
            in.pgood = profile.P_good;
            in.c = c;
            double bound = total_bound(in);
            double upper = result.mean_s + result.ci99_half;
            if (!(upper <= bound)) {
                ok = false;
                detail << name << " c=" << c << ": " << upper << " > " << bound << "; ";
            }
        }
    }
    if (detail.str().empty()) detail << "8 family/exponent combinations dominated";
    return {ok, detail.str()};
}

// 8. The factorial closed form dominates the series partial sums, exactly.
Outcome criterion_8() {
    for (int c = 0; c <= 4; ++c) {
        for (long long x = 0; x <= 10; ++x) {
            for (double p : {0.1, 0.5, 0.9}) {
                double partial = 0.0;
                for (long long n = x; n <= x + 2000; ++n)
                    partial += std::pow(static_cast<double>(n), c) *
                               std::pow(p, static_cast<double>(n - x));
                if (!(poly_geom_sum_bound(c, x, p) >= partial)) {
                    std::ostringstream detail;
                    detail << "violated at c=" << c << " X=" << x << " p=" << p;
                    return {false, detail.str()};
                }
            }
        }
    }
    return {true, "165 grid points dominated exactly"};
}

// 9. The monitor's memory is 2k+4 counters, independent of the run length.
Outcome criterion_9() {
    for (int k : {1, 2, 3}) {
        RestartStrategy strategy(k, poly_growth(2));
        Rng rng(900 + k);
        MarkerSet empty;
        strategy.observe(empty);
        for (long long step = 0; step < 1'000'000; ++step) {
            MarkerSet obs;
            if (uniform01(rng) < 0.2) obs.set_e(1 + static_cast<int>(rng() % k));
            if (uniform01(rng) < 0.1) obs.set_f(1 + static_cast<int>(rng() % k));
            if (strategy.observe(obs) == Action::Restart) strategy.observe(empty);
            if (strategy.counter_footprint() != 2 * k + 4) {
                std::ostringstream detail;
                detail << "footprint changed at step " << step << " for k=" << k;
                return {false, detail.str()};
            }
        }
    }
    return {true, "footprint 2k+4 held across 10^6 observations for k=1,2,3"};
}

// 10. Counter-based monitor vs the full-path reference, restart for restart.
Outcome criterion_10() {
    for (std::uint64_t seq = 0; seq < 500; ++seq) {
        Rng gen(derive_seed(1010, seq));
        int k = 1 + static_cast<int>(gen() % 3);
        int c = 1 + static_cast<int>(gen() % 3);
        int length = 20 + static_cast<int>(gen() % 181);
        RestartStrategy counter(k, poly_growth(c));
        testing::ReferenceStrategy reference(k, poly_growth(c));
        bool feed_initial = true;
        for (int pos = 0; pos < length; ++pos) {
            MarkerSet obs;
            for (int i = 1; i <= k; ++i) {
                if (uniform01(gen) < 0.3) obs.set_e(i);
                if (uniform01(gen) < 0.2) obs.set_f(i);
            }
            if (feed_initial) {
                counter.observe(MarkerSet{});
                reference.observe(MarkerSet{});
                feed_initial = false;
            }
            Action a = counter.observe(obs);
            Action b = reference.observe(obs);
            if (a != b) {
                std::ostringstream detail;
                detail << "divergence in sequence " << seq << " at position " << pos;
                return {false, detail.str()};
            }
            if (a == Action::Restart) feed_initial = true;
        }
    }
    return {true, "500 random sequences, identical restart positions"};
}

// 11. The majority protocol stabilizes and the monitor reports the good tail.
Outcome criterion_11() {
    ExperimentConfig config;
    config.family = "majority";
    config.params = "na=5;nb=6";
    config.c = 1;
    config.k = 1;
    config.trials = 10;
    config.limits.step_cap = 3'000'000;
    config.limits.quiet_threshold = 10'000;
    config.base_seed = 1111;
    auto factory = []() -> std::unique_ptr<BlackBoxSystem> {
        return std::make_unique<MajoritySystem>(5, 6);
    };
    auto result = run_experiment(factory, config, nullptr);
    long long good = 0;
    for (const auto& rec : result.records)
        if (!rec.truncated && rec.verdict == Verdict::GoodTail) ++good;
    std::ostringstream detail;
    detail << good << "/10 trials stabilized to the majority consensus";
    return {good >= 8, detail.str()};
}

// Companion to criterion 2: the same bounded blocks on the 7-state path do
// restart forever. Not numbered; printed for context when running criterion 2.
void companion_check_for_2() {
    ExperimentConfig config;
    config.family = "path";
    config.const_block = 2;
    config.trials = 20;
    config.limits.step_cap = 100'000;
    config.limits.quiet_threshold = 10'000;
    config.base_seed = 1002;
    auto result = run_experiment(gen_path(3), config);
    long long truncated = 0, deep = 0;
    for (const auto& rec : result.records) {
        if (rec.truncated) ++truncated;
        if (rec.restarts >= 10'000) ++deep;
    }
    std::printf("          companion: 7-state path, same blocks: %lld/20 truncated, %lld/20 with "
                ">= 10^4 restarts\n",
                truncated, deep);
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {1, "good tails found on the three-state chain", criterion_1},
        {2, "bounded blocks keep restarting on the short path", criterion_2},
        {3, "restart frequencies below the analytic bound", criterion_3},
        {4, "analyzer equals the exhaustive oracle", criterion_4},
        {5, "automaton reduction: traces and probabilities", criterion_5},
        {6, "log-log scaling slopes on the ring family", criterion_6},
        {7, "total step bound dominates the measured mean", criterion_7},
        {8, "series bound dominates partial sums", criterion_8},
        {9, "constant counter footprint", criterion_9},
        {10, "counter monitor equals full-path reference", criterion_10},
        {11, "majority protocol stabilizes", criterion_11},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        int id = std::atoi(argv[i]);
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion '%s' (expected 1..%zu)\n", argv[i],
                         criteria.size());
            return 2;
        }
        selected.push_back(id);
    }

    bool all_pass = true;
    for (const auto& criterion : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.id) == selected.end())
            continue;
        Outcome outcome = criterion.run();
        std::printf("criterion %2d [%s]: %s - %s\n", criterion.id, criterion.name,
                    outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
        if (criterion.id == 2) companion_check_for_2();
        if (criterion.id == 6 && !outcome.pass) companion_check_for_6();
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 1;
}
