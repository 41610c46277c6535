#pragma once

#include <vector>

#include "omtest/strategy.hpp"

namespace omtest::testing {

// Deliberately naive restart policy: stores the whole observation path of the
// current segment and rechecks the second half from scratch at every block
// boundary. Used as the ground truth for the counter-based implementation.
class ReferenceStrategy final : public MarkerStrategy {
public:
    ReferenceStrategy(int k, GrowthFunction growth) : k_(k), f_(std::move(growth)) {}

    Action observe(const MarkerSet& obs) override {
        if (fresh_segment_) {
            path_.clear();
            path_.push_back(obs);
            block_ = 2 * f_(restarts_);
            fresh_segment_ = false;
            return Action::Continue;
        }
        path_.push_back(obs);
        long long m = static_cast<long long>(path_.size()) - 1;
        if (m >= block_ && m % block_ == 0) {
            long long half = (m + 1) / 2;
            bool good = false;
            for (int i = 1; i <= k_ && !good; ++i) {
                bool has_e = false, has_f = false;
                for (long long pos = half; pos <= m; ++pos) {
                    has_e = has_e || path_[pos].has_e(i);
                    has_f = has_f || path_[pos].has_f(i);
                }
                good = has_e && !has_f;
            }
            if (!good) {
                ++restarts_;
                fresh_segment_ = true;
                return Action::Restart;
            }
        }
        return Action::Continue;
    }

    long long restart_count() const { return restarts_; }

private:
    int k_;
    GrowthFunction f_;
    long long restarts_ = 0;
    long long block_ = 0;
    bool fresh_segment_ = true;
    std::vector<MarkerSet> path_;
};

}  // namespace omtest::testing
