#pragma once

#include <functional>
#include <string>
#include <vector>

#include "omtest/markers.hpp"

namespace omtest {

enum class Action { Continue, Restart };

// A session consuming marker observations and deciding restart/continue.
// Protocol: after every reset (including the first), the caller feeds the
// initial observation (position 0), then one observation per step. When the
// session returns Restart it has already rolled over to the next segment and
// expects a position-0 observation next.
class MarkerStrategy {
public:
    virtual ~MarkerStrategy() = default;
    virtual Action observe(const MarkerSet& obs) = 0;
};

class GrowthFunction {
public:
    GrowthFunction(std::string name, std::function<long long(long long)> fn)
        : name_(std::move(name)), fn_(std::move(fn)) {}
    long long operator()(long long n) const { return fn_(n); }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    std::function<long long(long long)> fn_;
};

// n -> max(1, n^c). Clamped to 1 so the first segment samples nonempty
// blocks; saturates instead of overflowing for huge n.
GrowthFunction poly_growth(int c);

// n -> b. Bounded block sizes; kept for demonstrating that unbounded growth
// is required for the restart scheme to work on every chain.
GrowthFunction const_growth(long long b);

// Restart policy over marker observations: after the n-th restart, sample in
// blocks of 2*f(n) steps and restart as soon as the second half of the path
// sampled since the last restart contains no index i with an e_i and no f_i.
// Holds exactly 2k+4 counters regardless of how long the run gets.
class RestartStrategy final : public MarkerStrategy {
public:
    RestartStrategy(int marker_pairs, GrowthFunction growth);

    Action observe(const MarkerSet& obs) override;

    long long restart_count() const { return restarts_; }
    // Steps since the last restart; -1 between a restart and the next
    // position-0 observation.
    long long position() const { return pos_; }
    long long block_length() const { return block_; }
    int marker_pairs() const { return k_; }

    // Number of scalar counters held: 4 + 2k.
    int counter_footprint() const;

private:
    int k_;
    GrowthFunction f_;
    long long restarts_ = 0;
    long long pos_ = -1;
    long long block_ = 0;
    long long next_check_ = 0;
    std::vector<long long> last_e_;
    std::vector<long long> last_f_;
};

}  // namespace omtest
