#pragma once

#include "omtest/strategy.hpp"

namespace omtest {

// Closed-form bounds on the behaviour of the block-doubling restart policy,
// in terms of the progress radius Rm, the progress probability Pm, the good
// witness probability Pgamma and the good-run probability Pgood. Quantities
// that are probabilities are clamped to at most 1; bounds that genuinely
// degenerate (Pgamma = 1) come back as +infinity rather than a made-up
// finite value.

// P[restart again although the run could still reach a good component],
// for the segment running with block parameter f(n):
//   min(1, 3 (1-Pm)^(floor(f(n)/Rm) - 1)).
double incorrect_restart_bound(long long n, const GrowthFunction& f, long long rm, double pm);

// P[another restart] for the segment running with f(n):
//   min(1, 1 - Pgood (1 - incorrect_restart_bound)).
double restart_bound(long long n, const GrowthFunction& f, long long rm, double pm,
                     double pgood);

struct ThresholdX {
    double value;
    // Set when Pm = 1 makes the logarithm ratio degenerate; the returned
    // value is then (2 Rm)^(1/c) and the restart bound is already at its
    // floor for every n past it.
    bool degenerate;
};

// Smallest segment index past which the restart bound stays below
// 1 - Pgood/2 for f(n) = n^c:  X = (Rm (2 + ln(1/6)/ln(1-Pm)))^(1/c).
ThresholdX threshold_X(long long rm, double pm, int c);

// Expected steps of one segment running with f(n):
//   2 (Rm + f(n)) + 9 Rm / (Pm (1 - Pgamma)).
double fragment_bound(long long n, const GrowthFunction& f, long long rm, double pm,
                      double pgamma);

struct BoundInputs {
    long long rm = 1;
    double pm = 1.0;
    double pgamma = 0.0;
    double pgood = 1.0;
    int c = 1;
};

// Expected total steps before the last restart for f(n) = n^c. With
// X = threshold_X and T = 2 + 9/(Pm (1-Pgamma)):
//   2 X^(c+1) + X Rm T + (2 Rm / Pgood) T
//   + 2 (c+1)! (2 (X+c)^c / Pgood + 2^(c+1) / Pgood^(c+1)).
// Throws for c > 20 (the factorial exceeds what a double tracks exactly).
double total_bound(const BoundInputs& in);

// Closed-form dominator of the series sum_{n>=X} n^c p^(n-X):
//   (c+1)! ((X+c)^c / (1-p) + 1/(1-p)^(c+1)).
double poly_geom_sum_bound(int c, long long x, double p);

}  // namespace omtest
