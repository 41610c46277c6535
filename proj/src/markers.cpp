#include "omtest/markers.hpp"

#include <bit>

namespace omtest {

int MarkerSet::max_index() const {
    std::uint32_t all = e | f;
    if (all == 0) return 0;
    return 32 - std::countl_zero(all);
}

std::string format_markers(const MarkerSet& m) {
    if (m.empty()) return "-";
    std::string out;
    for (int i = 1; i <= 32; ++i) {
        if (m.has_e(i)) {
            if (!out.empty()) out += ',';
            out += 'e';
            out += std::to_string(i);
        }
    }
    for (int i = 1; i <= 32; ++i) {
        if (m.has_f(i)) {
            if (!out.empty()) out += ',';
            out += 'f';
            out += std::to_string(i);
        }
    }
    return out;
}

}  // namespace omtest
