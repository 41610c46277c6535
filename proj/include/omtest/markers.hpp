#pragma once

#include <cstdint>
#include <string>

namespace omtest {

// Observation over a set of 2k markers {e_1..e_k, f_1..f_k}, k <= 32.
// Marker indices are 1-based throughout.
struct MarkerSet {
    std::uint32_t e = 0;
    std::uint32_t f = 0;

    bool has_e(int i) const { return (e >> (i - 1)) & 1u; }
    bool has_f(int i) const { return (f >> (i - 1)) & 1u; }
    void set_e(int i) { e |= 1u << (i - 1); }
    void set_f(int i) { f |= 1u << (i - 1); }
    bool empty() const { return e == 0 && f == 0; }

    // Largest marker index mentioned, 0 if none.
    int max_index() const;

    bool operator==(const MarkerSet&) const = default;
};

// Renders "-" for the empty set, otherwise "e1,f2" style (e's first).
std::string format_markers(const MarkerSet& m);

}  // namespace omtest
