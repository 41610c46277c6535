#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omtest/model.hpp"

namespace omtest {

// Bottom strongly connected components (SCCs with no outgoing edge), each as
// a sorted state list, ordered by smallest member.
std::vector<std::vector<int>> bsccs(const LabeledMarkovChain& chain);

struct BsccVerdict {
    std::vector<int> states;
    // Indices i (1-based) such that the component contains an e_i state and
    // no f_i state. Empty means the component is bad.
    std::vector<int> good_indices;
    bool is_bad() const { return good_indices.empty(); }
};

std::vector<BsccVerdict> classify(const LabeledMarkovChain& chain, int k);

// Worst-case radii and probabilities of "progress" moves, split by side:
//   r_gamma / p_gamma  reaching the good components from outside;
//   R_gamma / P_gamma  producing a witness e_i inside a good component;
//   r_beta  / p_beta   reaching the bad components from outside;
//   R_beta  / P_beta   covering the disqualifying f_i's inside a bad one.
// A side is absent (all four fields unset) when the chain has no component
// of that kind. A reach radius is 0 with its probability unset when every
// state of the side already sits inside a component.
struct ProgressProfile {
    std::optional<long long> r_gamma, R_gamma, r_beta, R_beta;
    std::optional<double> p_gamma, P_gamma, p_beta, P_beta;
    long long R_m = 0;   // max of the defined radii
    double P_m = 1.0;    // min of the defined probabilities
    double P_good = 0.0; // probability of reaching a good component
};

ProgressProfile progress_profile(const LabeledMarkovChain& chain, int k);

// Probability of ever hitting `targets` (treated as absorbing) from the
// initial state, by Gaussian elimination over the states that can reach the
// target set and lie outside it.
double reach_probability(const LabeledMarkovChain& chain, const std::vector<bool>& targets);

// Probability of reaching a good component from the initial state.
double reach_prob_good(const LabeledMarkovChain& chain, int k);

// JSON text with keys r_gamma, R_gamma, r_beta, R_beta, p_gamma, P_gamma,
// p_beta, P_beta, R_m, P_m, P_good, in that order; unset fields serialize as
// the string "undef".
std::string profile_json(const ProgressProfile& profile);

}  // namespace omtest
