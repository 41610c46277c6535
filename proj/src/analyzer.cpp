#include "omtest/analyzer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace omtest {

namespace {

struct SccInfo {
    std::vector<int> comp_of;            // state -> component id
    std::vector<std::vector<int>> comps; // component id -> states (sorted)
    std::vector<bool> bottom;            // component id -> no outgoing edge
};

// Kosaraju with explicit stacks; chains stay well below any recursion limit
// but deep paths should not be able to blow the stack either way.
SccInfo scc_decompose(const LabeledMarkovChain& chain) {
    int n = chain.state_count();
    std::vector<std::vector<int>> radj(n);
    for (int s = 0; s < n; ++s)
        for (const auto& t : chain.row(s)) radj[t.target].push_back(s);

    std::vector<int> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    for (int root = 0; root < n; ++root) {
        if (seen[root]) continue;
        std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
        seen[root] = 1;
        while (!stack.empty()) {
            auto& [s, next] = stack.back();
            auto row = chain.row(s);
            if (next < row.size()) {
                int t = row[next++].target;
                if (!seen[t]) {
                    seen[t] = 1;
                    stack.emplace_back(t, 0);
                }
            } else {
                order.push_back(s);
                stack.pop_back();
            }
        }
    }

    SccInfo info;
    info.comp_of.assign(n, -1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (info.comp_of[*it] >= 0) continue;
        int id = static_cast<int>(info.comps.size());
        info.comps.emplace_back();
        std::vector<int> stack{*it};
        info.comp_of[*it] = id;
        while (!stack.empty()) {
            int s = stack.back();
            stack.pop_back();
            info.comps[id].push_back(s);
            for (int p : radj[s]) {
                if (info.comp_of[p] < 0) {
                    info.comp_of[p] = id;
                    stack.push_back(p);
                }
            }
        }
        std::sort(info.comps[id].begin(), info.comps[id].end());
    }

    info.bottom.assign(info.comps.size(), true);
    for (int s = 0; s < n; ++s)
        for (const auto& t : chain.row(s))
            if (info.comp_of[t.target] != info.comp_of[s]) info.bottom[info.comp_of[s]] = false;
    return info;
}

std::vector<std::vector<int>> reverse_adjacency(const LabeledMarkovChain& chain) {
    std::vector<std::vector<int>> radj(chain.state_count());
    for (int s = 0; s < chain.state_count(); ++s)
        for (const auto& t : chain.row(s)) radj[t.target].push_back(s);
    return radj;
}

// Backwards BFS; dist[x] = graph distance from x to the target set, -1 when
// unreachable, 0 inside the set.
std::vector<long long> distance_to(const LabeledMarkovChain& chain,
                                   const std::vector<bool>& targets,
                                   const std::vector<std::vector<int>>& radj) {
    std::vector<long long> dist(chain.state_count(), -1);
    std::queue<int> q;
    for (int s = 0; s < chain.state_count(); ++s) {
        if (targets[s]) {
            dist[s] = 0;
            q.push(s);
        }
    }
    while (!q.empty()) {
        int s = q.front();
        q.pop();
        for (int p : radj[s]) {
            if (dist[p] < 0) {
                dist[p] = dist[s] + 1;
                q.push(p);
            }
        }
    }
    return dist;
}

// P[hit the target set within `steps` steps], target treated as absorbing.
std::vector<double> hit_within(const LabeledMarkovChain& chain, const std::vector<bool>& targets,
                               long long steps) {
    int n = chain.state_count();
    std::vector<double> v(n, 0.0), next(n, 0.0);
    for (int s = 0; s < n; ++s) v[s] = targets[s] ? 1.0 : 0.0;
    for (long long t = 0; t < steps; ++t) {
        for (int s = 0; s < n; ++s) {
            if (targets[s]) {
                next[s] = 1.0;
                continue;
            }
            double acc = 0.0;
            for (const auto& e : chain.row(s)) acc += e.prob * v[e.target];
            next[s] = acc;
        }
        std::swap(v, next);
    }
    return v;
}

int required_mask(const LabeledMarkovChain& chain, const std::vector<int>& bscc, int k) {
    int mask = 0;
    for (int s : bscc)
        for (int i = 1; i <= k; ++i)
            if (chain.markers(s).has_e(i)) mask |= 1 << (i - 1);
    return mask;
}

int cover_bits(const MarkerSet& m, int k) {
    int bits = 0;
    for (int i = 1; i <= k; ++i)
        if (m.has_f(i)) bits |= 1 << (i - 1);
    return bits;
}

void check_marker_range(const LabeledMarkovChain& chain, int k) {
    if (!chain.marker_labeled())
        throw std::invalid_argument("analysis requires a marker-labeled chain");
    if (k < 1) throw std::invalid_argument("marker pair count must be positive");
    for (int s = 0; s < chain.state_count(); ++s)
        if (chain.markers(s).max_index() > k)
            throw std::invalid_argument("state " + std::to_string(s) +
                                        " uses a marker above the given pair count");
}

}  // namespace

std::vector<std::vector<int>> bsccs(const LabeledMarkovChain& chain) {
    auto info = scc_decompose(chain);
    std::vector<std::vector<int>> out;
    for (std::size_t c = 0; c < info.comps.size(); ++c)
        if (info.bottom[c]) out.push_back(info.comps[c]);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

std::vector<BsccVerdict> classify(const LabeledMarkovChain& chain, int k) {
    check_marker_range(chain, k);
    std::vector<BsccVerdict> out;
    for (auto& component : bsccs(chain)) {
        BsccVerdict v;
        v.states = component;
        for (int i = 1; i <= k; ++i) {
            bool has_e = false, has_f = false;
            for (int s : component) {
                has_e = has_e || chain.markers(s).has_e(i);
                has_f = has_f || chain.markers(s).has_f(i);
            }
            if (has_e && !has_f) v.good_indices.push_back(i);
        }
        out.push_back(std::move(v));
    }
    return out;
}

double reach_probability(const LabeledMarkovChain& chain, const std::vector<bool>& targets) {
    int n = chain.state_count();
    auto radj = reverse_adjacency(chain);
    auto dist = distance_to(chain, targets, radj);
    if (targets[chain.initial_state()]) return 1.0;
    if (dist[chain.initial_state()] < 0) return 0.0;

    // Unknowns: states that can reach the target but are outside it. All
    // other states contribute 0 (they can never hit the target).
    std::vector<int> index(n, -1);
    std::vector<int> states;
    for (int s = 0; s < n; ++s) {
        if (!targets[s] && dist[s] >= 0) {
            index[s] = static_cast<int>(states.size());
            states.push_back(s);
        }
    }
    int m = static_cast<int>(states.size());
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
    for (int r = 0; r < m; ++r) {
        int s = states[r];
        a[r][r] = 1.0;
        for (const auto& t : chain.row(s)) {
            if (targets[t.target])
                a[r][m] += t.prob;
            else if (index[t.target] >= 0)
                a[r][index[t.target]] -= t.prob;
        }
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        if (std::abs(a[col][col]) < 1e-14)
            throw std::runtime_error("reachability system is singular");
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            double factor = a[r][col] / a[col][col];
            if (factor == 0.0) continue;
            for (int c2 = col; c2 <= m; ++c2) a[r][c2] -= factor * a[col][c2];
        }
    }
    return a[index[chain.initial_state()]][m] / a[index[chain.initial_state()]][index[chain.initial_state()]];
}

double reach_prob_good(const LabeledMarkovChain& chain, int k) {
    std::vector<bool> good(chain.state_count(), false);
    for (const auto& v : classify(chain, k))
        if (!v.is_bad())
            for (int s : v.states) good[s] = true;
    return reach_probability(chain, good);
}

ProgressProfile progress_profile(const LabeledMarkovChain& chain, int k) {
    check_marker_range(chain, k);
    int n = chain.state_count();
    auto verdicts = classify(chain, k);
    auto radj = reverse_adjacency(chain);

    std::vector<bool> good_states(n, false), bad_states(n, false);
    std::vector<const BsccVerdict*> good_comps, bad_comps;
    for (const auto& v : verdicts) {
        if (v.is_bad()) {
            bad_comps.push_back(&v);
            for (int s : v.states) bad_states[s] = true;
        } else {
            good_comps.push_back(&v);
            for (int s : v.states) good_states[s] = true;
        }
    }

    ProgressProfile profile;

    if (!good_comps.empty()) {
        // Witness radius: from every state of a good component, the shortest
        // nonempty path to a state carrying e_i for some index i that makes
        // the component good.
        long long big_r = 0;
        std::vector<std::vector<bool>> comp_targets;
        for (const auto* v : good_comps) {
            std::vector<bool> target(n, false);
            for (int s : v->states)
                for (int i : v->good_indices)
                    if (chain.markers(s).has_e(i)) target[s] = true;
            comp_targets.push_back(target);
            auto dist = distance_to(chain, target, radj);
            for (int s : v->states) {
                long long best = -1;
                for (const auto& t : chain.row(s))
                    if (dist[t.target] >= 0 && (best < 0 || dist[t.target] + 1 < best))
                        best = dist[t.target] + 1;
                big_r = std::max(big_r, best);
            }
        }
        profile.R_gamma = big_r;

        double big_p = 1.0;
        for (std::size_t ci = 0; ci < good_comps.size(); ++ci) {
            auto h = hit_within(chain, comp_targets[ci], big_r - 1);
            for (int s : good_comps[ci]->states) {
                double val = 0.0;
                for (const auto& t : chain.row(s))
                    val += t.prob * (comp_targets[ci][t.target] ? 1.0 : h[t.target]);
                big_p = std::min(big_p, val);
            }
        }
        profile.P_gamma = big_p;

        auto dist = distance_to(chain, good_states, radj);
        long long small_r = 0;
        bool outside = false;
        for (int s = 0; s < n; ++s) {
            if (!good_states[s] && dist[s] > 0) {
                outside = true;
                small_r = std::max(small_r, dist[s]);
            }
        }
        profile.r_gamma = small_r;  // 0 when every reaching state is already inside
        if (outside) {
            auto v = hit_within(chain, good_states, small_r);
            double small_p = 1.0;
            for (int s = 0; s < n; ++s)
                if (!good_states[s] && dist[s] > 0) small_p = std::min(small_p, v[s]);
            profile.p_gamma = small_p;
        }
    }

    if (!bad_comps.empty()) {
        // Witness radius: shortest nonempty walk that, for every index i with
        // an e_i state in the component, visits an f_i state (the start state
        // counts towards the cover). Search layers over (state, missing set).
        long long big_r = 0;
        std::vector<int> comp_required;
        for (const auto* v : bad_comps) {
            int required = required_mask(chain, v->states, k);
            comp_required.push_back(required);
            if (std::popcount(static_cast<unsigned>(required)) > 20)
                throw std::invalid_argument("covering analysis supports at most 20 marker indices");
            // Remap the required bits onto a compact mask.
            std::vector<int> bit_index(k, -1);
            int bits = 0;
            for (int i = 0; i < k; ++i)
                if (required >> i & 1) bit_index[i] = bits++;
            auto compact = [&](const MarkerSet& m) {
                int mask = 0;
                for (int i = 0; i < k; ++i)
                    if ((required >> i & 1) && (cover_bits(m, k) >> i & 1)) mask |= 1 << bit_index[i];
                return mask;
            };
            int full = (1 << bits) - 1;
            for (int s : v->states) {
                if (required == 0) {
                    big_r = std::max(big_r, 1ll);
                    continue;
                }
                // BFS from (s, missing) where the start already covers its own
                // markers; the goal is missing == 0 at depth >= 1.
                std::vector<std::vector<long long>> seen(n, std::vector<long long>());
                auto seen_at = [&](int x) -> std::vector<long long>& {
                    if (seen[x].empty()) seen[x].assign(full + 1, -1);
                    return seen[x];
                };
                int start_missing = full & ~compact(chain.markers(s));
                std::queue<std::pair<int, int>> q;
                seen_at(s)[start_missing] = 0;
                q.emplace(s, start_missing);
                long long found = -1;
                while (!q.empty() && found < 0) {
                    auto [x, missing] = q.front();
                    q.pop();
                    long long d = seen_at(x)[missing];
                    for (const auto& t : chain.row(x)) {
                        int nm = missing & ~compact(chain.markers(t.target));
                        if (nm == 0) {
                            found = d + 1;
                            break;
                        }
                        auto& sx = seen_at(t.target);
                        if (sx[nm] < 0) {
                            sx[nm] = d + 1;
                            q.emplace(t.target, nm);
                        }
                    }
                }
                if (found < 0)
                    throw std::runtime_error("bad component misses a required marker cover");
                big_r = std::max(big_r, found);
            }
        }
        profile.R_beta = big_r;

        double big_p = 1.0;
        for (std::size_t ci = 0; ci < bad_comps.size(); ++ci) {
            const auto* v = bad_comps[ci];
            int required = comp_required[ci];
            if (required == 0) continue;  // every nonempty walk makes progress
            std::vector<int> bit_index(k, -1);
            int bits = 0;
            for (int i = 0; i < k; ++i)
                if (required >> i & 1) bit_index[i] = bits++;
            auto compact = [&](const MarkerSet& m) {
                int mask = 0;
                for (int i = 0; i < k; ++i)
                    if ((required >> i & 1) && (cover_bits(m, k) >> i & 1)) mask |= 1 << bit_index[i];
                return mask;
            };
            int full = (1 << bits) - 1;
            // g[x][missing] = P[cover `missing` within t more steps from x],
            // with x's own label already applied.
            std::vector<std::vector<double>> g(n, std::vector<double>(full + 1, 0.0));
            for (int s : v->states) g[s][0] = 1.0;
            auto next = g;
            for (long long t = 0; t < big_r; ++t) {
                for (int s : v->states) {
                    for (int missing = 1; missing <= full; ++missing) {
                        double acc = 0.0;
                        for (const auto& e : chain.row(s))
                            acc += e.prob * g[e.target][missing & ~compact(chain.markers(e.target))];
                        next[s][missing] = acc;
                    }
                    next[s][0] = 1.0;
                }
                std::swap(g, next);
            }
            for (int s : v->states) {
                int start_missing = full & ~compact(chain.markers(s));
                big_p = std::min(big_p, g[s][start_missing]);
            }
        }
        profile.P_beta = big_p;

        auto dist = distance_to(chain, bad_states, radj);
        long long small_r = 0;
        bool outside = false;
        for (int s = 0; s < n; ++s) {
            if (!bad_states[s] && dist[s] > 0) {
                outside = true;
                small_r = std::max(small_r, dist[s]);
            }
        }
        profile.r_beta = small_r;
        if (outside) {
            auto v = hit_within(chain, bad_states, small_r);
            double small_p = 1.0;
            for (int s = 0; s < n; ++s)
                if (!bad_states[s] && dist[s] > 0) small_p = std::min(small_p, v[s]);
            profile.p_beta = small_p;
        }
    }

    profile.R_m = 0;
    for (auto radius : {profile.r_gamma, profile.R_gamma, profile.r_beta, profile.R_beta})
        if (radius) profile.R_m = std::max(profile.R_m, *radius);
    profile.P_m = 1.0;
    for (auto prob : {profile.p_gamma, profile.P_gamma, profile.p_beta, profile.P_beta})
        if (prob) profile.P_m = std::min(profile.P_m, *prob);
    profile.P_good = reach_probability(chain, good_states);
    return profile;
}

std::string profile_json(const ProgressProfile& p) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    auto radius = [&](const std::optional<long long>& v) {
        return v ? std::to_string(*v) : std::string("\"undef\"");
    };
    auto prob = [&](const std::optional<double>& v) {
        return v ? num(*v) : std::string("\"undef\"");
    };
    out << "{\n";
    out << "  \"r_gamma\": " << radius(p.r_gamma) << ",\n";
    out << "  \"R_gamma\": " << radius(p.R_gamma) << ",\n";
    out << "  \"r_beta\": " << radius(p.r_beta) << ",\n";
    out << "  \"R_beta\": " << radius(p.R_beta) << ",\n";
    out << "  \"p_gamma\": " << prob(p.p_gamma) << ",\n";
    out << "  \"P_gamma\": " << prob(p.P_gamma) << ",\n";
    out << "  \"p_beta\": " << prob(p.p_beta) << ",\n";
    out << "  \"P_beta\": " << prob(p.P_beta) << ",\n";
    out << "  \"R_m\": " << p.R_m << ",\n";
    out << "  \"P_m\": " << num(p.P_m) << ",\n";
    out << "  \"P_good\": " << num(p.P_good) << "\n";
    out << "}";
    return out.str();
}

}  // namespace omtest
