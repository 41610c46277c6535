#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "omtest/model.hpp"
#include "omtest/strategy.hpp"

namespace omtest {

// --- chain generators -------------------------------------------------------

// Three states: start self-loops with 1-p and moves on with p into a two-state
// recurrent pair where the goal (labeled e1) is entered with q and left with
// 1-q. Every run is eventually good.
LabeledMarkovChain gen_simple(double p, double q);

// Start branches to an absorbing unlabeled sink with 1-q, or with q into a
// deterministic ring of length m whose branch state reaches the goal (labeled
// e1) with p. Reach probability q, witness radius m.
LabeledMarkovChain gen_ring(int m, double p, double q);

// A ladder of m forward edges, each taken with p and otherwise falling into
// the absorbing sink; the rungs and the absorbing goal carry e1, the sink is
// unlabeled. Good runs have probability p^m.
LabeledMarkovChain gen_ladder(int m, double p);

// Deterministic path of 2b+1 states ending in a self-loop labeled e1.
LabeledMarkovChain gen_path(long long b);

// --- population protocol ----------------------------------------------------

// Four-state majority protocol over na + nb agents (strong A/B, weak a/b).
// A uniformly random ordered pair interacts each step:
//   (A,B)->(a,b)   (A,b)->(A,a)   (B,a)->(B,b)   (a,b)->(a,a)
// and mirrored for the reversed order. The observation is {e1} when every
// agent supports the initial majority opinion and {f1} otherwise, so a run is
// good exactly when the population stabilizes to the correct consensus.
// The underlying configuration chain is never materialized.
class MajoritySystem final : public BlackBoxSystem {
public:
    MajoritySystem(int na, int nb);  // throws on a tie
    MarkerSet reset() override;
    MarkerSet step(Rng& rng) override;
    int agent_count() const { return na_ + nb_; }

private:
    MarkerSet observe() const;
    int na_, nb_;
    bool majority_is_a_;
    std::array<long long, 4> counts_{};  // A, B, a, b
};

// --- trials and experiments -------------------------------------------------

enum class Verdict { GoodTail, BadTail, Inconclusive };
const char* verdict_name(Verdict v);

struct TrialRecord {
    std::uint64_t seed = 0;
    long long steps_before_last_restart = 0;  // sum over completed segments
    long long restarts = 0;
    bool truncated = false;  // step cap hit while still restarting
    Verdict verdict = Verdict::Inconclusive;
    std::vector<long long> segments;  // first 64 segment lengths
};

struct TrialLimits {
    long long step_cap = 1'000'000;
    // Consecutive steps without a restart after which the trial is declared
    // converged.
    long long quiet_threshold = 10'000;
};

// Verdict lookup for systems whose underlying chain is known.
struct StateClasses {
    std::vector<Verdict> of_state;
};
StateClasses state_classes(const LabeledMarkovChain& chain, int k);

// Drives the strategy over the system: resets on Restart, stops when the
// current segment has run quiet_threshold steps without a restart (converged)
// or when step_cap total steps have been executed (truncated, verdict
// inconclusive). Converged trials take their verdict from the white-box state
// classes when available; otherwise the final window of quiet_threshold
// observations must contain an e_i and no f_i for some i.
TrialRecord run_trial(BlackBoxSystem& system, MarkerStrategy& strategy, int k,
                      const TrialLimits& limits, Rng& rng,
                      const StateClasses* whitebox = nullptr);

struct ExperimentConfig {
    std::string family;  // label only
    std::string params;  // label only, `;`-separated to keep the CSV intact
    int c = 2;
    // When set, overrides the polynomial growth with a constant block size.
    std::optional<long long> const_block;
    long long trials = 100;
    TrialLimits limits;
    std::uint64_t base_seed = 0;
    int jobs = 1;
    int k = 1;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<TrialRecord> records;  // by trial index
    double mean_s = 0.0;
    double stderr_s = 0.0;
    double ci99_half = 0.0;            // 2.576 * stderr
    std::vector<long long> restart_hist;  // hist[r] = number of trials with r restarts
    long long trials_with_at_least(long long restarts) const;
};

using SystemFactory = std::function<std::unique_ptr<BlackBoxSystem>()>;

// Runs config.trials independent trials with per-trial seeds derived from
// (base_seed, index); identical configs produce identical results regardless
// of the number of worker threads.
ExperimentResult run_experiment(const SystemFactory& make_system, const ExperimentConfig& config,
                                const StateClasses* whitebox = nullptr);
ExperimentResult run_experiment(const LabeledMarkovChain& chain, const ExperimentConfig& config);

// One row per trial, `family,params,c,seed,trial,S,restarts,truncated,verdict`
// with header, then a final `SUMMARY,<mean>,<stderr>,<ci99>` row.
std::string experiment_csv(const ExperimentResult& result);

// Least-squares slope of ln y against ln x; requires >= 3 strictly positive
// points.
double loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace omtest
