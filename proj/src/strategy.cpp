#include "omtest/strategy.hpp"

#include <limits>
#include <stdexcept>

namespace omtest {

GrowthFunction poly_growth(int c) {
    if (c < 1) throw std::invalid_argument("poly_growth: exponent must be >= 1");
    return GrowthFunction("n^" + std::to_string(c), [c](long long n) -> long long {
        if (n <= 1) return 1;
        long long result = 1;
        constexpr long long cap = std::numeric_limits<long long>::max() / 4;
        for (int i = 0; i < c; ++i) {
            if (result > cap / n) return cap;  // saturate, blocks this long never finish anyway
            result *= n;
        }
        return result;
    });
}

GrowthFunction const_growth(long long b) {
    if (b < 1) throw std::invalid_argument("const_growth: block parameter must be >= 1");
    return GrowthFunction("const" + std::to_string(b), [b](long long) { return b; });
}

RestartStrategy::RestartStrategy(int marker_pairs, GrowthFunction growth)
    : k_(marker_pairs), f_(std::move(growth)), last_e_(marker_pairs, -1),
      last_f_(marker_pairs, -1) {
    if (marker_pairs < 1 || marker_pairs > 32)
        throw std::invalid_argument("marker pair count must be in 1..32");
}

Action RestartStrategy::observe(const MarkerSet& obs) {
    if (obs.max_index() > k_)
        throw std::invalid_argument("observation uses a marker above the configured pair count");

    if (pos_ < 0) {  // position 0 of a fresh segment
        pos_ = 0;
        for (int i = 0; i < k_; ++i) {
            last_e_[i] = obs.has_e(i + 1) ? 0 : -1;
            last_f_[i] = obs.has_f(i + 1) ? 0 : -1;
        }
        block_ = 2 * f_(restarts_);
        next_check_ = block_;
        return Action::Continue;
    }

    ++pos_;
    for (int i = 0; i < k_; ++i) {
        if (obs.has_e(i + 1)) last_e_[i] = pos_;
        if (obs.has_f(i + 1)) last_f_[i] = pos_;
    }

    if (pos_ == next_check_) {
        // Second half of the current segment covers positions ceil(m/2)..m.
        long long half = pos_ / 2;
        bool good = false;
        for (int i = 0; i < k_; ++i) {
            if (last_e_[i] >= half && last_f_[i] < half) {
                good = true;
                break;
            }
        }
        if (!good) {
            ++restarts_;
            pos_ = -1;
            return Action::Restart;
        }
        next_check_ += block_;
    }
    return Action::Continue;
}

int RestartStrategy::counter_footprint() const {
    // restarts_, pos_, block_, next_check_ plus the two per-marker tables.
    return 4 + static_cast<int>(last_e_.size()) + static_cast<int>(last_f_.size());
}

}  // namespace omtest
