#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omtest/model.hpp"
#include "omtest/strategy.hpp"

namespace omtest {

// Deterministic Rabin automaton over an explicit finite alphabet. A word is
// accepted iff its run visits some E_j infinitely often and the matching F_j
// only finitely often.
class RabinAutomaton {
public:
    struct Pair {
        std::vector<bool> in_e;  // indexed by state
        std::vector<bool> in_f;
    };

    RabinAutomaton(int states, int initial, std::vector<std::string> alphabet,
                   std::vector<int> delta, std::vector<Pair> pairs);

    int state_count() const { return state_count_; }
    int initial_state() const { return initial_; }
    int pair_count() const { return static_cast<int>(pairs_.size()); }
    int alphabet_size() const { return static_cast<int>(alphabet_.size()); }
    const std::string& symbol_name(int id) const { return alphabet_[id]; }
    std::optional<int> symbol_id(const std::string& name) const;

    int next(int state, int symbol) const { return delta_[state * alphabet_size() + symbol]; }
    const Pair& pair(int j) const { return pairs_[j]; }  // 0-based

    // e_j set iff the state lies in E_j, f_j iff in F_j (1-based markers).
    MarkerSet state_markers(int state) const;

private:
    int state_count_;
    int initial_;
    std::vector<std::string> alphabet_;
    std::vector<int> delta_;  // state * |alphabet| + symbol -> state
    std::vector<Pair> pairs_;
};

// Parses the `.dra` text format:
//   dra 1
//   states N
//   initial Q
//   alphabet SYM...
//   pairs K
//   trans Q SYM Q'        (`*` as SYM supplies a per-state default)
//   pair J E Q... ; F Q...  (J is 1-based; E or F may be empty)
RabinAutomaton parse_dra(std::istream& in);
RabinAutomaton parse_dra(const std::string& text);
RabinAutomaton parse_dra_file(const std::string& path);

// Acceptance of the ultimately periodic word prefix . cycle^omega, decided by
// iterating the cycle until the state at a cycle boundary repeats and then
// inspecting the states visited inside the loop.
bool dra_lasso_accepts(const RabinAutomaton& dra, std::span<const int> prefix,
                       std::span<const int> cycle);

// Membership of prefix . cycle^omega in the canonical marker language: some
// index j has an e_j inside the cycle and no f_j anywhere in the cycle
// (f_j occurrences confined to the prefix are fine).
bool rabin_lasso_member(int k, std::span<const MarkerSet> prefix,
                        std::span<const MarkerSet> cycle);

// Product chain over the reachable part of S x Q. The automaton component
// advances on the observation of the source state, and each product state is
// labeled with the markers of its automaton component, so acceptance of the
// raw observation word becomes membership of the product observation word in
// the marker language, with identical path probabilities.
LabeledMarkovChain product(const LabeledMarkovChain& chain, const RabinAutomaton& dra);

// Adapter turning a marker strategy into one reading raw symbols: it tracks
// the automaton state across each segment (resetting to q0 on restart) and
// feeds the inner strategy the markers of the tracked state. The tracked
// state is advanced with the current symbol *after* the inner strategy is
// fed, which makes the fed sequence coincide, step for step and across
// restarts, with the observations of the product chain driven by the same
// randomness.
class LiftedStrategy {
public:
    LiftedStrategy(const RabinAutomaton& dra, MarkerStrategy& inner);

    Action observe(int symbol);

    MarkerSet last_fed() const { return fed_; }
    int automaton_state() const { return q_; }

private:
    const RabinAutomaton* dra_;
    MarkerStrategy* inner_;
    int q_;
    bool at_segment_start_ = true;
    MarkerSet fed_{};
};

}  // namespace omtest
