#include "omtest/brute_force.hpp"

#include <algorithm>
#include <cmath>

namespace omtest {

namespace {

constexpr long long kBudget = 40'000'000;  // DFS expansions per profile

struct Closure {
    int n = 0;
    std::vector<std::vector<bool>> reach;  // reflexive
};

Closure closure_of(const LabeledMarkovChain& chain) {
    Closure c;
    c.n = chain.state_count();
    c.reach.assign(c.n, std::vector<bool>(c.n, false));
    for (int s = 0; s < c.n; ++s) {
        c.reach[s][s] = true;
        for (const auto& t : chain.row(s)) c.reach[s][t.target] = true;
    }
    for (int via = 0; via < c.n; ++via)
        for (int s = 0; s < c.n; ++s)
            if (c.reach[s][via])
                for (int t = 0; t < c.n; ++t)
                    if (c.reach[via][t]) c.reach[s][t] = true;
    return c;
}

struct Components {
    std::vector<int> comp_of;
    std::vector<std::vector<int>> members;
    std::vector<bool> bottom;
    std::vector<bool> good;          // bottom and witnessed by some index
    std::vector<int> required_mask;  // e-presence mask of bottom components
};

Components components_of(const LabeledMarkovChain& chain, int k, const Closure& c) {
    Components comp;
    comp.comp_of.assign(c.n, -1);
    for (int s = 0; s < c.n; ++s) {
        if (comp.comp_of[s] >= 0) continue;
        int id = static_cast<int>(comp.members.size());
        comp.members.emplace_back();
        for (int t = s; t < c.n; ++t) {
            if (comp.comp_of[t] < 0 && c.reach[s][t] && c.reach[t][s]) {
                comp.comp_of[t] = id;
                comp.members[id].push_back(t);
            }
        }
    }
    comp.bottom.assign(comp.members.size(), true);
    for (int s = 0; s < c.n; ++s)
        for (const auto& t : chain.row(s))
            if (comp.comp_of[t.target] != comp.comp_of[s]) comp.bottom[comp.comp_of[s]] = false;
    comp.good.assign(comp.members.size(), false);
    comp.required_mask.assign(comp.members.size(), 0);
    for (std::size_t id = 0; id < comp.members.size(); ++id) {
        if (!comp.bottom[id]) continue;
        for (int i = 1; i <= k; ++i) {
            bool has_e = false, has_f = false;
            for (int s : comp.members[id]) {
                has_e = has_e || chain.markers(s).has_e(i);
                has_f = has_f || chain.markers(s).has_f(i);
            }
            if (has_e && !has_f) comp.good[id] = true;
            if (has_e) comp.required_mask[id] |= 1 << (i - 1);
        }
    }
    return comp;
}

void spend(long long& budget, const char* what) {
    if (--budget < 0) throw InconclusiveError(std::string("enumeration budget exhausted in ") + what);
}

// Minimal length of a nonempty walk from `from` ending in `targets`, -1 if
// none within the horizon.
long long shortest_to(const LabeledMarkovChain& chain, int from, const std::vector<bool>& targets,
                      long long horizon, long long& budget) {
    long long best = -1;
    auto dfs = [&](auto&& self, int x, long long depth) -> void {
        if (best >= 0 && depth >= best) return;
        if (depth >= horizon) return;
        for (const auto& t : chain.row(x)) {
            spend(budget, "walk search");
            if (targets[t.target]) {
                if (best < 0 || depth + 1 < best) best = depth + 1;
            } else {
                self(self, t.target, depth + 1);
            }
        }
    };
    dfs(dfs, from, 0);
    return best;
}

// Minimal length of a nonempty walk from `from` collecting every bit of
// `missing0` (a state contributes the f-indices of its label).
long long shortest_cover(const LabeledMarkovChain& chain, int from, int missing0, int k,
                         long long horizon, long long& budget) {
    auto f_bits = [&](int s) {
        int bits = 0;
        for (int i = 1; i <= k; ++i)
            if (chain.markers(s).has_f(i)) bits |= 1 << (i - 1);
        return bits;
    };
    long long best = -1;
    auto dfs = [&](auto&& self, int x, long long depth, int missing) -> void {
        if (best >= 0 && depth >= best) return;
        if (depth >= horizon) return;
        for (const auto& t : chain.row(x)) {
            spend(budget, "cover search");
            int nm = missing & ~f_bits(t.target);
            if (nm == 0) {
                if (best < 0 || depth + 1 < best) best = depth + 1;
            } else {
                self(self, t.target, depth + 1, nm);
            }
        }
    };
    dfs(dfs, from, 0, missing0 & ~0);  // start state was already applied by the caller
    return best;
}

// P[some position 1..len lies in `targets`], by summing path products.
double prob_hit(const LabeledMarkovChain& chain, int from, const std::vector<bool>& targets,
                long long len, long long& budget) {
    double total = 0.0;
    auto dfs = [&](auto&& self, int x, long long depth, double weight) -> void {
        if (depth == len) return;
        for (const auto& t : chain.row(x)) {
            spend(budget, "hit probability");
            if (targets[t.target])
                total += weight * t.prob;
            else
                self(self, t.target, depth + 1, weight * t.prob);
        }
    };
    dfs(dfs, from, 0, 1.0);
    return total;
}

// P[positions 0..len jointly cover `missing0`].
double prob_cover(const LabeledMarkovChain& chain, int from, int missing0, int k, long long len,
                  long long& budget) {
    auto f_bits = [&](int s) {
        int bits = 0;
        for (int i = 1; i <= k; ++i)
            if (chain.markers(s).has_f(i)) bits |= 1 << (i - 1);
        return bits;
    };
    if (missing0 == 0) return 1.0;
    double total = 0.0;
    auto dfs = [&](auto&& self, int x, long long depth, int missing, double weight) -> void {
        if (depth == len) return;
        for (const auto& t : chain.row(x)) {
            spend(budget, "cover probability");
            int nm = missing & ~f_bits(t.target);
            if (nm == 0)
                total += weight * t.prob;
            else
                self(self, t.target, depth + 1, nm, weight * t.prob);
        }
    };
    dfs(dfs, from, 0, missing0, 1.0);
    return total;
}

}  // namespace

double brute_force_reach_good(const LabeledMarkovChain& chain, int k) {
    auto closure = closure_of(chain);
    auto comp = components_of(chain, k, closure);
    int n = chain.state_count();
    std::vector<int> kind(n, 0);  // 1 good component, -1 bad component, 0 transient
    for (int s = 0; s < n; ++s) {
        int id = comp.comp_of[s];
        if (comp.bottom[id]) kind[s] = comp.good[id] ? 1 : -1;
    }
    std::vector<double> v(n, 0.0), next(n, 0.0);
    for (int s = 0; s < n; ++s) v[s] = kind[s] == 1 ? 1.0 : 0.0;
    for (long long iter = 0; iter < 2'000'000; ++iter) {
        double delta = 0.0;
        for (int s = 0; s < n; ++s) {
            if (kind[s] != 0) {
                next[s] = v[s];
                continue;
            }
            double acc = 0.0;
            for (const auto& t : chain.row(s)) acc += t.prob * v[t.target];
            delta = std::max(delta, std::abs(acc - v[s]));
            next[s] = acc;
        }
        std::swap(v, next);
        if (delta < 1e-13) return v[chain.initial_state()];
    }
    throw InconclusiveError("reach probability iteration did not converge");
}

ProgressProfile brute_force_profile(const LabeledMarkovChain& chain, int k, long long horizon) {
    if (!chain.marker_labeled())
        throw std::invalid_argument("brute-force profile requires a marker-labeled chain");
    if (horizon < 1) throw std::invalid_argument("horizon must be positive");
    long long budget = kBudget;

    auto closure = closure_of(chain);
    auto comp = components_of(chain, k, closure);
    int n = chain.state_count();

    std::vector<bool> good_states(n, false), bad_states(n, false);
    bool any_good = false, any_bad = false;
    for (int s = 0; s < n; ++s) {
        int id = comp.comp_of[s];
        if (!comp.bottom[id]) continue;
        if (comp.good[id]) {
            good_states[s] = true;
            any_good = true;
        } else {
            bad_states[s] = true;
            any_bad = true;
        }
    }

    ProgressProfile profile;
    auto settle = [&](long long radius) {
        if (radius < 0 || radius >= horizon)
            throw InconclusiveError("horizon too small to settle a radius");
        return radius;
    };

    if (any_good) {
        long long big_r = 0;
        for (std::size_t id = 0; id < comp.members.size(); ++id) {
            if (!comp.bottom[id] || !comp.good[id]) continue;
            std::vector<bool> target(n, false);
            for (int i = 1; i <= k; ++i) {
                bool has_f = false;
                for (int s : comp.members[id]) has_f = has_f || chain.markers(s).has_f(i);
                if (has_f) continue;
                for (int s : comp.members[id])
                    if (chain.markers(s).has_e(i)) target[s] = true;
            }
            for (int s : comp.members[id])
                big_r = std::max(big_r, settle(shortest_to(chain, s, target, horizon, budget)));
        }
        profile.R_gamma = big_r;

        double big_p = 1.0;
        for (std::size_t id = 0; id < comp.members.size(); ++id) {
            if (!comp.bottom[id] || !comp.good[id]) continue;
            std::vector<bool> target(n, false);
            for (int i = 1; i <= k; ++i) {
                bool has_f = false;
                for (int s : comp.members[id]) has_f = has_f || chain.markers(s).has_f(i);
                if (has_f) continue;
                for (int s : comp.members[id])
                    if (chain.markers(s).has_e(i)) target[s] = true;
            }
            for (int s : comp.members[id])
                big_p = std::min(big_p, prob_hit(chain, s, target, big_r, budget));
        }
        profile.P_gamma = big_p;

        long long small_r = 0;
        bool outside = false;
        for (int s = 0; s < n; ++s) {
            if (good_states[s]) continue;
            bool can = false;
            for (int t = 0; t < n; ++t) can = can || (good_states[t] && closure.reach[s][t]);
            if (!can) continue;
            outside = true;
            small_r = std::max(small_r, settle(shortest_to(chain, s, good_states, horizon, budget)));
        }
        profile.r_gamma = small_r;
        if (outside) {
            double small_p = 1.0;
            for (int s = 0; s < n; ++s) {
                if (good_states[s]) continue;
                bool can = false;
                for (int t = 0; t < n; ++t) can = can || (good_states[t] && closure.reach[s][t]);
                if (can) small_p = std::min(small_p, prob_hit(chain, s, good_states, small_r, budget));
            }
            profile.p_gamma = small_p;
        }
    }

    if (any_bad) {
        long long big_r = 0;
        for (std::size_t id = 0; id < comp.members.size(); ++id) {
            if (!comp.bottom[id] || comp.good[id]) continue;
            int required = comp.required_mask[id];
            for (int s : comp.members[id]) {
                int missing = required;
                for (int i = 1; i <= k; ++i)
                    if (chain.markers(s).has_f(i)) missing &= ~(1 << (i - 1));
                long long r = missing == 0
                                  ? 1
                                  : settle(shortest_cover(chain, s, missing, k, horizon, budget));
                big_r = std::max(big_r, r);
            }
        }
        profile.R_beta = big_r;

        double big_p = 1.0;
        for (std::size_t id = 0; id < comp.members.size(); ++id) {
            if (!comp.bottom[id] || comp.good[id]) continue;
            int required = comp.required_mask[id];
            for (int s : comp.members[id]) {
                int missing = required;
                for (int i = 1; i <= k; ++i)
                    if (chain.markers(s).has_f(i)) missing &= ~(1 << (i - 1));
                big_p = std::min(big_p, prob_cover(chain, s, missing, k, big_r, budget));
            }
        }
        profile.P_beta = big_p;

        long long small_r = 0;
        bool outside = false;
        for (int s = 0; s < n; ++s) {
            if (bad_states[s]) continue;
            bool can = false;
            for (int t = 0; t < n; ++t) can = can || (bad_states[t] && closure.reach[s][t]);
            if (!can) continue;
            outside = true;
            small_r = std::max(small_r, settle(shortest_to(chain, s, bad_states, horizon, budget)));
        }
        profile.r_beta = small_r;
        if (outside) {
            double small_p = 1.0;
            for (int s = 0; s < n; ++s) {
                if (bad_states[s]) continue;
                bool can = false;
                for (int t = 0; t < n; ++t) can = can || (bad_states[t] && closure.reach[s][t]);
                if (can) small_p = std::min(small_p, prob_hit(chain, s, bad_states, small_r, budget));
            }
            profile.p_beta = small_p;
        }
    }

    profile.R_m = 0;
    for (auto radius : {profile.r_gamma, profile.R_gamma, profile.r_beta, profile.R_beta})
        if (radius) profile.R_m = std::max(profile.R_m, *radius);
    profile.P_m = 1.0;
    for (auto prob : {profile.p_gamma, profile.P_gamma, profile.p_beta, profile.P_beta})
        if (prob) profile.P_m = std::min(profile.P_m, *prob);
    profile.P_good = brute_force_reach_good(chain, k);
    return profile;
}

}  // namespace omtest
