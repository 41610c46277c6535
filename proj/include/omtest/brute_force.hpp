#pragma once

#include <stdexcept>

#include "omtest/analyzer.hpp"

namespace omtest {

// Raised when a horizon or enumeration budget was too small to settle a
// radius, so the brute-force result would be unreliable.
struct InconclusiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Same profile as progress_profile, computed the slow way on purpose: graph
// reachability by boolean closure, radii by exhaustive walk enumeration up to
// `horizon`, window probabilities by summing over all paths of the exact
// window length, and the reach probability by iterating the transition map to
// convergence (1e-12). Intended for chains of at most ~12 states as an
// independent check; throws InconclusiveError when a radius hits the horizon.
ProgressProfile brute_force_profile(const LabeledMarkovChain& chain, int k, long long horizon);

// Just the reach-a-good-component probability, by power iteration; usable on
// somewhat larger chains than the full profile.
double brute_force_reach_good(const LabeledMarkovChain& chain, int k);

}  // namespace omtest
