#pragma once

#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "omtest/markers.hpp"
#include "omtest/rng.hpp"

namespace omtest {

struct Transition {
    int target = 0;
    double prob = 0.0;
};

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

enum class LabelKind { Markers, Raw };

// Explicit-state Markov chain with one observation per state. Rows hold only
// positive-probability edges and sum to 1 within 1e-9. Immutable after
// construction; safe to share read-only across threads.
class LabeledMarkovChain {
public:
    static constexpr double kRowSumTolerance = 1e-9;

    static LabeledMarkovChain marker_chain(int states, int initial,
                                           std::vector<std::vector<Transition>> rows,
                                           int marker_count, std::vector<MarkerSet> obs);
    static LabeledMarkovChain raw_chain(int states, int initial,
                                        std::vector<std::vector<Transition>> rows,
                                        std::vector<std::string> symbol_names,
                                        std::vector<int> obs);

    int state_count() const { return state_count_; }
    int initial_state() const { return initial_; }
    std::span<const Transition> row(int s) const { return rows_[s]; }

    LabelKind label_kind() const { return kind_; }
    bool marker_labeled() const { return kind_ == LabelKind::Markers; }

    // Marker-labeled accessors.
    int marker_count() const { return marker_count_; }
    const MarkerSet& markers(int s) const { return marker_obs_[s]; }

    // Raw-labeled accessors.
    int raw_symbol(int s) const { return raw_obs_[s]; }
    int symbol_count() const { return static_cast<int>(symbols_.size()); }
    const std::string& symbol_name(int id) const { return symbols_[id]; }
    std::optional<int> symbol_id(const std::string& name) const;

private:
    LabeledMarkovChain() = default;
    void validate() const;

    int state_count_ = 0;
    int initial_ = 0;
    std::vector<std::vector<Transition>> rows_;
    LabelKind kind_ = LabelKind::Markers;
    int marker_count_ = 0;
    std::vector<MarkerSet> marker_obs_;
    std::vector<int> raw_obs_;
    std::vector<std::string> symbols_;
};

// Parses the `.lmc` text format:
//   lmc 1
//   states N
//   initial I
//   markers K            (present iff the chain is marker-labeled)
//   obs S TOKEN          TOKEN = `-` | comma list like `e1,f2` | raw symbol
//   trans SRC DST PROB   PROB = decimal or fraction a/b, in (0,1]
// `#` starts a comment. States are 0-based. Marker-labeled states without an
// obs line default to the empty set; raw-labeled states must all be listed.
LabeledMarkovChain parse_model(std::istream& in);
LabeledMarkovChain parse_model(const std::string& text);
LabeledMarkovChain parse_model_file(const std::string& path);

std::string write_lmc(const LabeledMarkovChain& chain);

// One transition from `state`, sampled by inverse CDF over the row in file
// order with a single uniform draw. Deterministic given the engine state.
int sample_step(const LabeledMarkovChain& chain, int state, Rng& rng);

// Reset/step/observe view of a system. Implementations expose no state, only
// observations; current_state() exists for white-box harness bookkeeping and
// returns nothing for genuinely implicit systems.
class BlackBoxSystem {
public:
    virtual ~BlackBoxSystem() = default;
    virtual MarkerSet reset() = 0;
    virtual MarkerSet step(Rng& rng) = 0;
    virtual std::optional<int> current_state() const { return std::nullopt; }
};

// A marker-labeled chain as a black box. The initial state is position 0 of
// the path; the first step call yields position 1.
class ChainSession final : public BlackBoxSystem {
public:
    explicit ChainSession(const LabeledMarkovChain& chain);
    MarkerSet reset() override;
    MarkerSet step(Rng& rng) override;
    std::optional<int> current_state() const override { return cursor_; }

private:
    const LabeledMarkovChain* chain_;
    int cursor_;
};

ChainSession as_black_box(const LabeledMarkovChain& chain);

// Raw-symbol counterpart used when an automaton interprets the observations.
class RawSession {
public:
    explicit RawSession(const LabeledMarkovChain& chain);
    int reset();
    int step(Rng& rng);
    int current_state() const { return cursor_; }

private:
    const LabeledMarkovChain* chain_;
    int cursor_;
};

}  // namespace omtest
