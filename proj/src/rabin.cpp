#include "omtest/rabin.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

namespace omtest {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

int parse_int(const std::string& tok, int line, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, std::string("expected integer for ") + what + ", got '" + tok + "'");
    return value;
}

}  // namespace

RabinAutomaton::RabinAutomaton(int states, int initial, std::vector<std::string> alphabet,
                               std::vector<int> delta, std::vector<Pair> pairs)
    : state_count_(states), initial_(initial), alphabet_(std::move(alphabet)),
      delta_(std::move(delta)), pairs_(std::move(pairs)) {
    if (states <= 0) throw std::invalid_argument("automaton needs at least one state");
    if (initial < 0 || initial >= states) throw std::invalid_argument("initial state out of range");
    if (alphabet_.empty()) throw std::invalid_argument("alphabet must be nonempty");
    if (pairs_.empty()) throw std::invalid_argument("automaton needs at least one pair");
    if (delta_.size() != static_cast<std::size_t>(states) * alphabet_.size())
        throw std::invalid_argument("transition table has the wrong size");
    for (int t : delta_)
        if (t < 0 || t >= states)
            throw std::invalid_argument("transition function is not total or leaves the state set");
    for (const auto& p : pairs_)
        if (p.in_e.size() != static_cast<std::size_t>(states) ||
            p.in_f.size() != static_cast<std::size_t>(states))
            throw std::invalid_argument("pair membership tables have the wrong size");
}

std::optional<int> RabinAutomaton::symbol_id(const std::string& name) const {
    for (int i = 0; i < alphabet_size(); ++i)
        if (alphabet_[i] == name) return i;
    return std::nullopt;
}

MarkerSet RabinAutomaton::state_markers(int state) const {
    MarkerSet m;
    for (int j = 0; j < pair_count(); ++j) {
        if (pairs_[j].in_e[state]) m.set_e(j + 1);
        if (pairs_[j].in_f[state]) m.set_f(j + 1);
    }
    return m;
}

RabinAutomaton parse_dra(std::istream& in) {
    int line_no = 0;
    bool header_seen = false;
    int states = -1, initial = -1, pair_count = -1;
    std::vector<std::string> alphabet;
    std::map<std::string, int> symbol_ids;
    // (state, symbol) -> target; -1 unset. Wildcards collected separately.
    std::vector<int> delta;
    std::vector<int> wildcard;
    std::vector<RabinAutomaton::Pair> pairs;
    std::vector<bool> pair_seen;

    auto check_state = [&](int q, int line) {
        if (q < 0 || q >= states)
            throw ParseError(line, "state " + std::to_string(q) + " out of range");
    };

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (!header_seen) {
            if (toks.size() != 2 || toks[0] != "dra" || toks[1] != "1")
                throw ParseError(line_no, "expected header 'dra 1'");
            header_seen = true;
            continue;
        }
        const std::string& kw = toks[0];
        if (kw == "states") {
            if (toks.size() != 2) throw ParseError(line_no, "usage: states N");
            states = parse_int(toks[1], line_no, "state count");
            if (states <= 0) throw ParseError(line_no, "state count must be positive");
            wildcard.assign(states, -1);
        } else if (kw == "initial") {
            if (toks.size() != 2) throw ParseError(line_no, "usage: initial Q");
            if (states < 0) throw ParseError(line_no, "'states' must come first");
            initial = parse_int(toks[1], line_no, "initial state");
            check_state(initial, line_no);
        } else if (kw == "alphabet") {
            if (toks.size() < 2) throw ParseError(line_no, "usage: alphabet SYM...");
            if (!alphabet.empty()) throw ParseError(line_no, "duplicate 'alphabet'");
            for (std::size_t i = 1; i < toks.size(); ++i) {
                if (toks[i] == "*") throw ParseError(line_no, "'*' is reserved");
                if (!symbol_ids.emplace(toks[i], static_cast<int>(alphabet.size())).second)
                    throw ParseError(line_no, "duplicate symbol '" + toks[i] + "'");
                alphabet.push_back(toks[i]);
            }
        } else if (kw == "pairs") {
            if (toks.size() != 2) throw ParseError(line_no, "usage: pairs K");
            if (states < 0) throw ParseError(line_no, "'states' must come first");
            pair_count = parse_int(toks[1], line_no, "pair count");
            if (pair_count < 1 || pair_count > 32)
                throw ParseError(line_no, "pair count must be in 1..32");
            pairs.assign(pair_count, RabinAutomaton::Pair{std::vector<bool>(states, false),
                                                          std::vector<bool>(states, false)});
            pair_seen.assign(pair_count, false);
        } else if (kw == "trans") {
            if (toks.size() != 4) throw ParseError(line_no, "usage: trans Q SYM Q'");
            if (states < 0 || alphabet.empty())
                throw ParseError(line_no, "'states' and 'alphabet' must come first");
            if (delta.empty()) delta.assign(static_cast<std::size_t>(states) * alphabet.size(), -1);
            int src = parse_int(toks[1], line_no, "source state");
            check_state(src, line_no);
            int dst = parse_int(toks[3], line_no, "target state");
            check_state(dst, line_no);
            if (toks[2] == "*") {
                if (wildcard[src] >= 0)
                    throw ParseError(line_no, "duplicate wildcard for state " + std::to_string(src));
                wildcard[src] = dst;
            } else {
                auto it = symbol_ids.find(toks[2]);
                if (it == symbol_ids.end())
                    throw ParseError(line_no, "unknown symbol '" + toks[2] + "'");
                int& slot = delta[static_cast<std::size_t>(src) * alphabet.size() + it->second];
                if (slot >= 0)
                    throw ParseError(line_no, "duplicate transition for state " +
                                                  std::to_string(src) + " on '" + toks[2] + "'");
                slot = dst;
            }
        } else if (kw == "pair") {
            if (pair_count < 0) throw ParseError(line_no, "'pairs' must come first");
            if (toks.size() < 4 || toks[1].empty())
                throw ParseError(line_no, "usage: pair J E Q... ; F Q...");
            int j = parse_int(toks[1], line_no, "pair index");
            if (j < 1 || j > pair_count)
                throw ParseError(line_no, "pair index " + std::to_string(j) + " out of range 1.." +
                                              std::to_string(pair_count));
            if (pair_seen[j - 1]) throw ParseError(line_no, "duplicate pair " + std::to_string(j));
            pair_seen[j - 1] = true;
            std::size_t i = 2;
            if (i >= toks.size() || toks[i] != "E") throw ParseError(line_no, "expected 'E'");
            ++i;
            while (i < toks.size() && toks[i] != ";") {
                int q = parse_int(toks[i], line_no, "E member");
                check_state(q, line_no);
                pairs[j - 1].in_e[q] = true;
                ++i;
            }
            if (i >= toks.size()) throw ParseError(line_no, "expected ';' between E and F");
            ++i;
            if (i >= toks.size() || toks[i] != "F") throw ParseError(line_no, "expected 'F'");
            ++i;
            while (i < toks.size()) {
                int q = parse_int(toks[i], line_no, "F member");
                check_state(q, line_no);
                pairs[j - 1].in_f[q] = true;
                ++i;
            }
        } else {
            throw ParseError(line_no, "unknown directive '" + kw + "'");
        }
    }
    if (!header_seen) throw ParseError(line_no, "empty input, expected 'dra 1'");
    if (states < 0) throw ParseError(line_no, "missing 'states'");
    if (initial < 0) throw ParseError(line_no, "missing 'initial'");
    if (alphabet.empty()) throw ParseError(line_no, "missing 'alphabet'");
    if (pair_count < 0) throw ParseError(line_no, "missing 'pairs'");
    for (int j = 0; j < pair_count; ++j)
        if (!pair_seen[j])
            throw ParseError(line_no, "pair " + std::to_string(j + 1) + " never defined");
    if (delta.empty()) delta.assign(static_cast<std::size_t>(states) * alphabet.size(), -1);
    for (int q = 0; q < states; ++q) {
        for (std::size_t a = 0; a < alphabet.size(); ++a) {
            int& slot = delta[static_cast<std::size_t>(q) * alphabet.size() + a];
            if (slot < 0) slot = wildcard[q];
            if (slot < 0)
                throw ParseError(line_no, "state " + std::to_string(q) + " has no transition on '" +
                                              alphabet[a] + "' and no wildcard");
        }
    }
    return RabinAutomaton(states, initial, std::move(alphabet), std::move(delta),
                          std::move(pairs));
}

RabinAutomaton parse_dra(const std::string& text) {
    std::istringstream in(text);
    return parse_dra(in);
}

RabinAutomaton parse_dra_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open automaton file: " + path);
    return parse_dra(in);
}

bool dra_lasso_accepts(const RabinAutomaton& dra, std::span<const int> prefix,
                       std::span<const int> cycle) {
    if (cycle.empty()) throw std::invalid_argument("cycle must be nonempty");
    auto check_symbol = [&](int a) {
        if (a < 0 || a >= dra.alphabet_size())
            throw std::invalid_argument("symbol outside the automaton alphabet");
    };
    int q = dra.initial_state();
    for (int a : prefix) {
        check_symbol(a);
        q = dra.next(q, a);
    }
    for (int a : cycle) check_symbol(a);

    // The state at each cycle boundary determines the rest of the run, so the
    // boundary states repeat within |Q|+1 iterations; the pass between the two
    // occurrences is exactly the set of states visited infinitely often.
    std::vector<int> first_seen(dra.state_count(), -1);
    std::vector<int> boundary_states;
    int iter = 0;
    while (first_seen[q] < 0) {
        first_seen[q] = iter++;
        boundary_states.push_back(q);
        for (int a : cycle) q = dra.next(q, a);
    }
    int loop_start = first_seen[q];
    std::vector<bool> visited(dra.state_count(), false);
    for (std::size_t i = loop_start; i < boundary_states.size(); ++i) {
        int s = boundary_states[i];
        for (int a : cycle) {
            visited[s] = true;
            s = dra.next(s, a);
        }
    }
    for (int j = 0; j < dra.pair_count(); ++j) {
        const auto& p = dra.pair(j);
        bool hits_e = false, hits_f = false;
        for (int s = 0; s < dra.state_count(); ++s) {
            if (!visited[s]) continue;
            hits_e = hits_e || p.in_e[s];
            hits_f = hits_f || p.in_f[s];
        }
        if (hits_e && !hits_f) return true;
    }
    return false;
}

bool rabin_lasso_member(int k, std::span<const MarkerSet> prefix,
                        std::span<const MarkerSet> cycle) {
    (void)prefix;  // finitely many occurrences are irrelevant
    if (cycle.empty()) throw std::invalid_argument("cycle must be nonempty");
    for (int i = 1; i <= k; ++i) {
        bool e_in_cycle = false, f_in_cycle = false;
        for (const auto& m : cycle) {
            e_in_cycle = e_in_cycle || m.has_e(i);
            f_in_cycle = f_in_cycle || m.has_f(i);
        }
        if (e_in_cycle && !f_in_cycle) return true;
    }
    return false;
}

LabeledMarkovChain product(const LabeledMarkovChain& chain, const RabinAutomaton& dra) {
    if (chain.marker_labeled())
        throw std::invalid_argument("product expects a raw-labeled chain");
    // Translate chain symbols into the automaton alphabet once.
    std::vector<int> sym(chain.symbol_count());
    for (int i = 0; i < chain.symbol_count(); ++i) {
        auto id = dra.symbol_id(chain.symbol_name(i));
        if (!id)
            throw std::invalid_argument("chain observation '" + chain.symbol_name(i) +
                                        "' is not in the automaton alphabet");
        sym[i] = *id;
    }

    // Discover the reachable part of S x Q breadth-first; unreachable states
    // never influence probabilities.
    std::map<std::pair<int, int>, int> ids;
    std::vector<std::pair<int, int>> pair_of;
    std::queue<int> todo;
    auto intern = [&](int s, int q) {
        auto [it, fresh] = ids.emplace(std::make_pair(s, q), static_cast<int>(pair_of.size()));
        if (fresh) {
            pair_of.emplace_back(s, q);
            todo.push(it->second);
        }
        return it->second;
    };
    intern(chain.initial_state(), dra.initial_state());

    std::vector<std::vector<Transition>> rows;
    std::vector<MarkerSet> obs;
    while (!todo.empty()) {
        int id = todo.front();
        todo.pop();
        auto [s, q] = pair_of[id];
        int q_next = dra.next(q, sym[chain.raw_symbol(s)]);
        if (static_cast<int>(rows.size()) <= id) rows.resize(id + 1);
        if (static_cast<int>(obs.size()) <= id) obs.resize(id + 1);
        obs[id] = dra.state_markers(q);
        // Keep the source row order so a shared uniform draw picks matching
        // successors in the chain and in the product.
        for (const auto& t : chain.row(s)) rows[id].push_back({intern(t.target, q_next), t.prob});
    }
    rows.resize(pair_of.size());
    obs.resize(pair_of.size());
    return LabeledMarkovChain::marker_chain(static_cast<int>(pair_of.size()), 0, std::move(rows),
                                            dra.pair_count(), std::move(obs));
}

LiftedStrategy::LiftedStrategy(const RabinAutomaton& dra, MarkerStrategy& inner)
    : dra_(&dra), inner_(&inner), q_(dra.initial_state()) {}

Action LiftedStrategy::observe(int symbol) {
    if (symbol < 0 || symbol >= dra_->alphabet_size())
        throw std::invalid_argument("symbol outside the automaton alphabet");
    if (at_segment_start_) {
        q_ = dra_->initial_state();
        at_segment_start_ = false;
    }
    fed_ = dra_->state_markers(q_);
    Action action = inner_->observe(fed_);
    if (action == Action::Restart) {
        at_segment_start_ = true;
    } else {
        q_ = dra_->next(q_, symbol);
    }
    return action;
}

}  // namespace omtest
