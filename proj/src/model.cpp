#include "omtest/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
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

double parse_prob(const std::string& tok, int line) {
    double value = 0.0;
    auto slash = tok.find('/');
    if (slash != std::string::npos) {
        long long num = 0, den = 0;
        auto a = std::from_chars(tok.data(), tok.data() + slash, num);
        auto b = std::from_chars(tok.data() + slash + 1, tok.data() + tok.size(), den);
        if (a.ec != std::errc() || b.ec != std::errc() || a.ptr != tok.data() + slash ||
            b.ptr != tok.data() + tok.size() || den <= 0)
            throw ParseError(line, "bad fraction '" + tok + "'");
        value = static_cast<double>(num) / static_cast<double>(den);
    } else {
        char* end = nullptr;
        value = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size())
            throw ParseError(line, "bad probability '" + tok + "'");
    }
    if (!(value > 0.0))
        throw ParseError(line, "probability must be positive, got '" + tok + "' "
                               "(omit zero-probability edges instead of listing them)");
    if (value > 1.0) throw ParseError(line, "probability above 1: '" + tok + "'");
    return value;
}

bool is_marker_token(const std::string& tok) {
    // e<digits> or f<digits>, possibly comma separated
    if (tok == "-") return true;
    std::size_t i = 0;
    while (i < tok.size()) {
        if (tok[i] != 'e' && tok[i] != 'f') return false;
        ++i;
        std::size_t start = i;
        while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
        if (i == start) return false;
        if (i < tok.size()) {
            if (tok[i] != ',') return false;
            ++i;
            if (i == tok.size()) return false;
        }
    }
    return true;
}

MarkerSet parse_marker_token(const std::string& tok, int k, int line) {
    MarkerSet m;
    if (tok == "-") return m;
    std::size_t i = 0;
    while (i < tok.size()) {
        char kind = tok[i++];
        std::size_t start = i;
        while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
        int idx = parse_int(tok.substr(start, i - start), line, "marker index");
        if (idx < 1 || idx > k)
            throw ParseError(line, "marker index " + std::to_string(idx) + " out of range 1.." +
                                       std::to_string(k));
        if (kind == 'e')
            m.set_e(idx);
        else
            m.set_f(idx);
        if (i < tok.size()) ++i;  // comma
    }
    return m;
}

}  // namespace

void LabeledMarkovChain::validate() const {
    if (state_count_ <= 0) throw std::invalid_argument("chain needs at least one state");
    if (initial_ < 0 || initial_ >= state_count_)
        throw std::invalid_argument("initial state out of range");
    for (int s = 0; s < state_count_; ++s) {
        double sum = 0.0;
        std::set<int> seen;
        for (const auto& t : rows_[s]) {
            if (t.target < 0 || t.target >= state_count_)
                throw std::invalid_argument("state " + std::to_string(s) +
                                            " has an edge to missing state " +
                                            std::to_string(t.target));
            if (!(t.prob > 0.0) || t.prob > 1.0)
                throw std::invalid_argument("state " + std::to_string(s) +
                                            " has an edge with probability outside (0,1]");
            if (!seen.insert(t.target).second)
                throw std::invalid_argument("state " + std::to_string(s) +
                                            " lists state " + std::to_string(t.target) + " twice");
            sum += t.prob;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw std::invalid_argument("row of state " + std::to_string(s) + " sums to " +
                                        std::to_string(sum) + ", expected 1");
    }
    if (kind_ == LabelKind::Markers) {
        if (marker_count_ < 1 || marker_count_ > 32)
            throw std::invalid_argument("marker count must be in 1..32");
        for (int s = 0; s < state_count_; ++s)
            if (marker_obs_[s].max_index() > marker_count_)
                throw std::invalid_argument("state " + std::to_string(s) +
                                            " uses a marker above the declared count");
    } else {
        for (int s = 0; s < state_count_; ++s)
            if (raw_obs_[s] < 0 || raw_obs_[s] >= symbol_count())
                throw std::invalid_argument("state " + std::to_string(s) + " has no observation");
    }
}

LabeledMarkovChain LabeledMarkovChain::marker_chain(int states, int initial,
                                                    std::vector<std::vector<Transition>> rows,
                                                    int marker_count,
                                                    std::vector<MarkerSet> obs) {
    LabeledMarkovChain c;
    c.state_count_ = states;
    c.initial_ = initial;
    c.rows_ = std::move(rows);
    c.kind_ = LabelKind::Markers;
    c.marker_count_ = marker_count;
    c.marker_obs_ = std::move(obs);
    c.marker_obs_.resize(states);
    c.rows_.resize(states);
    c.validate();
    return c;
}

LabeledMarkovChain LabeledMarkovChain::raw_chain(int states, int initial,
                                                 std::vector<std::vector<Transition>> rows,
                                                 std::vector<std::string> symbol_names,
                                                 std::vector<int> obs) {
    LabeledMarkovChain c;
    c.state_count_ = states;
    c.initial_ = initial;
    c.rows_ = std::move(rows);
    c.rows_.resize(states);
    c.kind_ = LabelKind::Raw;
    c.symbols_ = std::move(symbol_names);
    c.raw_obs_ = std::move(obs);
    c.raw_obs_.resize(states, -1);
    c.validate();
    return c;
}

std::optional<int> LabeledMarkovChain::symbol_id(const std::string& name) const {
    for (int i = 0; i < symbol_count(); ++i)
        if (symbols_[i] == name) return i;
    return std::nullopt;
}

LabeledMarkovChain parse_model(std::istream& in) {
    int line_no = 0;
    bool header_seen = false;
    int states = -1;
    int initial = 0;
    bool initial_seen = false;
    int markers = -1;  // -1: raw-labeled
    std::vector<std::vector<Transition>> rows;
    std::vector<MarkerSet> marker_obs;
    std::vector<int> raw_obs;
    std::vector<std::string> symbols;
    std::vector<bool> obs_seen;
    std::map<std::string, int> symbol_ids;

    auto intern = [&](const std::string& name) {
        auto it = symbol_ids.find(name);
        if (it != symbol_ids.end()) return it->second;
        int id = static_cast<int>(symbols.size());
        symbols.push_back(name);
        symbol_ids.emplace(name, id);
        return id;
    };
    auto need_states = [&](int line) {
        if (states < 0) throw ParseError(line, "'states' must come first");
    };
    auto check_state = [&](int s, int line) {
        if (s < 0 || s >= states)
            throw ParseError(line, "state " + std::to_string(s) + " out of range 0.." +
                                       std::to_string(states - 1));
    };

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (!header_seen) {
            if (toks.size() != 2 || toks[0] != "lmc" || toks[1] != "1")
                throw ParseError(line_no, "expected header 'lmc 1'");
            header_seen = true;
            continue;
        }
        const std::string& kw = toks[0];
        if (kw == "states") {
            if (toks.size() != 2) throw ParseError(line_no, "usage: states N");
            if (states >= 0) throw ParseError(line_no, "duplicate 'states'");
            states = parse_int(toks[1], line_no, "state count");
            if (states <= 0) throw ParseError(line_no, "state count must be positive");
            rows.resize(states);
            marker_obs.resize(states);
            raw_obs.resize(states, -1);
            obs_seen.resize(states, false);
        } else if (kw == "initial") {
            if (toks.size() != 2) throw ParseError(line_no, "usage: initial I");
            need_states(line_no);
            initial = parse_int(toks[1], line_no, "initial state");
            check_state(initial, line_no);
            initial_seen = true;
        } else if (kw == "markers") {
            if (toks.size() != 2) throw ParseError(line_no, "usage: markers K");
            if (markers >= 0) throw ParseError(line_no, "duplicate 'markers'");
            for (bool seen : obs_seen)
                if (seen) throw ParseError(line_no, "'markers' must precede all 'obs' lines");
            markers = parse_int(toks[1], line_no, "marker count");
            if (markers < 1 || markers > 32)
                throw ParseError(line_no, "marker count must be in 1..32");
        } else if (kw == "obs") {
            if (toks.size() != 3) throw ParseError(line_no, "usage: obs S TOKEN");
            need_states(line_no);
            int s = parse_int(toks[1], line_no, "state");
            check_state(s, line_no);
            if (obs_seen[s]) throw ParseError(line_no, "duplicate observation for state " +
                                                           std::to_string(s));
            obs_seen[s] = true;
            if (markers >= 0) {
                if (!is_marker_token(toks[2]))
                    throw ParseError(line_no, "marker-labeled chain but '" + toks[2] +
                                                  "' is not a marker set (mixed labeling)");
                marker_obs[s] = parse_marker_token(toks[2], markers, line_no);
            } else {
                if (toks[2] == "-" || toks[2].find(',') != std::string::npos)
                    throw ParseError(line_no,
                                     "raw-labeled chain (no 'markers' line) cannot use marker "
                                     "tokens (mixed labeling)");
                raw_obs[s] = intern(toks[2]);
            }
        } else if (kw == "trans") {
            if (toks.size() != 4) throw ParseError(line_no, "usage: trans SRC DST PROB");
            need_states(line_no);
            int src = parse_int(toks[1], line_no, "source state");
            int dst = parse_int(toks[2], line_no, "target state");
            check_state(src, line_no);
            check_state(dst, line_no);
            double prob = parse_prob(toks[3], line_no);
            for (const auto& t : rows[src])
                if (t.target == dst)
                    throw ParseError(line_no, "duplicate edge " + std::to_string(src) + " -> " +
                                                  std::to_string(dst));
            rows[src].push_back({dst, prob});
        } else {
            throw ParseError(line_no, "unknown directive '" + kw + "'");
        }
    }
    if (!header_seen) throw ParseError(line_no, "empty input, expected 'lmc 1'");
    if (states < 0) throw ParseError(line_no, "missing 'states'");
    if (!initial_seen) throw ParseError(line_no, "missing 'initial'");

    for (int s = 0; s < states; ++s) {
        double sum = 0.0;
        for (const auto& t : rows[s]) sum += t.prob;
        if (std::abs(sum - 1.0) > LabeledMarkovChain::kRowSumTolerance)
            throw ParseError(line_no, "row of state " + std::to_string(s) + " sums to " +
                                          std::to_string(sum) + ", expected 1");
    }
    if (markers >= 0) return LabeledMarkovChain::marker_chain(states, initial, std::move(rows),
                                                              markers, std::move(marker_obs));
    for (int s = 0; s < states; ++s)
        if (raw_obs[s] < 0)
            throw ParseError(line_no, "raw-labeled chain: state " + std::to_string(s) +
                                          " has no 'obs' line");
    return LabeledMarkovChain::raw_chain(states, initial, std::move(rows), std::move(symbols),
                                         std::move(raw_obs));
}

LabeledMarkovChain parse_model(const std::string& text) {
    std::istringstream in(text);
    return parse_model(in);
}

LabeledMarkovChain parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    return parse_model(in);
}

std::string write_lmc(const LabeledMarkovChain& chain) {
    std::ostringstream out;
    out << "lmc 1\n";
    out << "states " << chain.state_count() << "\n";
    out << "initial " << chain.initial_state() << "\n";
    if (chain.marker_labeled()) {
        out << "markers " << chain.marker_count() << "\n";
        for (int s = 0; s < chain.state_count(); ++s)
            if (!chain.markers(s).empty())
                out << "obs " << s << " " << format_markers(chain.markers(s)) << "\n";
    } else {
        for (int s = 0; s < chain.state_count(); ++s)
            out << "obs " << s << " " << chain.symbol_name(chain.raw_symbol(s)) << "\n";
    }
    char buf[64];
    for (int s = 0; s < chain.state_count(); ++s) {
        for (const auto& t : chain.row(s)) {
            std::snprintf(buf, sizeof buf, "%.17g", t.prob);
            out << "trans " << s << " " << t.target << " " << buf << "\n";
        }
    }
    return out.str();
}

int sample_step(const LabeledMarkovChain& chain, int state, Rng& rng) {
    if (state < 0 || state >= chain.state_count())
        throw std::out_of_range("sample_step: state out of range");
    auto row = chain.row(state);
    double u = uniform01(rng);
    double cum = 0.0;
    for (const auto& t : row) {
        cum += t.prob;
        if (u < cum) return t.target;
    }
    return row.back().target;
}

ChainSession::ChainSession(const LabeledMarkovChain& chain) : chain_(&chain) {
    if (!chain.marker_labeled())
        throw std::invalid_argument(
            "raw-labeled chain cannot be run as a black box directly; build the product with an "
            "automaton first");
    cursor_ = chain.initial_state();
}

MarkerSet ChainSession::reset() {
    cursor_ = chain_->initial_state();
    return chain_->markers(cursor_);
}

MarkerSet ChainSession::step(Rng& rng) {
    cursor_ = sample_step(*chain_, cursor_, rng);
    return chain_->markers(cursor_);
}

ChainSession as_black_box(const LabeledMarkovChain& chain) { return ChainSession(chain); }

RawSession::RawSession(const LabeledMarkovChain& chain) : chain_(&chain) {
    if (chain.marker_labeled())
        throw std::invalid_argument("RawSession expects a raw-labeled chain");
    cursor_ = chain.initial_state();
}

int RawSession::reset() {
    cursor_ = chain_->initial_state();
    return chain_->raw_symbol(cursor_);
}

int RawSession::step(Rng& rng) {
    cursor_ = sample_step(*chain_, cursor_, rng);
    return chain_->raw_symbol(cursor_);
}

}  // namespace omtest
