#include "doctest.h"

#include <cmath>
#include <map>

#include "omtest/harness.hpp"
#include "omtest/model.hpp"

using namespace omtest;

namespace {

const char* kSimpleChain =
    "lmc 1\n"
    "states 3\n"
    "initial 0\n"
    "markers 1\n"
    "obs 2 e1\n"
    "trans 0 0 1/2\n"
    "trans 0 1 1/2\n"
    "trans 1 1 1/2\n"
    "trans 1 2 1/2\n"
    "trans 2 2 1/2\n"
    "trans 2 1 1/2\n";

}  // namespace

TEST_CASE("parse: one-state self loop with marker label") {
    auto chain = parse_model("lmc 1\nstates 1\ninitial 0\nmarkers 1\nobs 0 e1\ntrans 0 0 1\n");
    CHECK(chain.state_count() == 1);
    CHECK(chain.marker_labeled());
    CHECK(chain.markers(0).has_e(1));
    CHECK(chain.row(0).size() == 1);
}

TEST_CASE("parse: three-state chain rows sum to one") {
    auto chain = parse_model(kSimpleChain);
    CHECK(chain.state_count() == 3);
    for (int s = 0; s < 3; ++s) {
        double sum = 0.0;
        for (const auto& t : chain.row(s)) sum += t.prob;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(chain.markers(0).empty());
    CHECK(chain.markers(2).has_e(1));
}

TEST_CASE("parse: row-sum violation names the state") {
    const char* text =
        "lmc 1\nstates 2\ninitial 0\nmarkers 1\ntrans 0 1 0.8\ntrans 1 1 1\n";
    CHECK_THROWS_WITH_AS(parse_model(text), doctest::Contains("state 0"), ParseError);
}

TEST_CASE("parse: explicit zero probability is rejected") {
    const char* text = "lmc 1\nstates 1\ninitial 0\nmarkers 1\ntrans 0 0 0\n";
    CHECK_THROWS_AS(parse_model(text), ParseError);
}

TEST_CASE("parse: dangling state index") {
    const char* text = "lmc 1\nstates 1\ninitial 0\nmarkers 1\ntrans 0 3 1\n";
    CHECK_THROWS_WITH_AS(parse_model(text), doctest::Contains("out of range"), ParseError);
}

TEST_CASE("parse: mixed labeling styles are rejected") {
    CHECK_THROWS_WITH_AS(
        parse_model("lmc 1\nstates 1\ninitial 0\nmarkers 1\nobs 0 ready\ntrans 0 0 1\n"),
        doctest::Contains("mixed"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model("lmc 1\nstates 1\ninitial 0\nobs 0 -\ntrans 0 0 1\n"),
                         doctest::Contains("mixed"), ParseError);
}

TEST_CASE("parse: raw chain needs every observation") {
    CHECK_THROWS_WITH_AS(
        parse_model("lmc 1\nstates 2\ninitial 0\nobs 0 a\ntrans 0 1 1\ntrans 1 1 1\n"),
        doctest::Contains("no 'obs'"), ParseError);
    auto chain =
        parse_model("lmc 1\nstates 2\ninitial 0\nobs 0 a\nobs 1 b\ntrans 0 1 1\ntrans 1 1 1\n");
    CHECK(!chain.marker_labeled());
    CHECK(chain.symbol_name(chain.raw_symbol(1)) == "b");
}

TEST_CASE("parse: fractions and duplicate edges") {
    auto chain = parse_model("lmc 1\nstates 2\ninitial 0\nmarkers 1\n"
                             "trans 0 0 1/3\ntrans 0 1 2/3\ntrans 1 1 1\n");
    CHECK(chain.row(0)[0].prob == doctest::Approx(1.0 / 3));
    CHECK_THROWS_WITH_AS(parse_model("lmc 1\nstates 1\ninitial 0\nmarkers 1\n"
                                     "trans 0 0 1/2\ntrans 0 0 1/2\n"),
                         doctest::Contains("duplicate edge"), ParseError);
}

TEST_CASE("write_lmc round trips") {
    auto chain = parse_model(kSimpleChain);
    auto again = parse_model(write_lmc(chain));
    CHECK(again.state_count() == chain.state_count());
    CHECK(again.marker_count() == chain.marker_count());
    for (int s = 0; s < chain.state_count(); ++s) {
        REQUIRE(again.row(s).size() == chain.row(s).size());
        CHECK(again.markers(s) == chain.markers(s));
        for (std::size_t i = 0; i < chain.row(s).size(); ++i) {
            CHECK(again.row(s)[i].target == chain.row(s)[i].target);
            CHECK(again.row(s)[i].prob == chain.row(s)[i].prob);
        }
    }
}

TEST_CASE("sample_step: deterministic cases") {
    auto loop = parse_model("lmc 1\nstates 1\ninitial 0\nmarkers 1\ntrans 0 0 1\n");
    Rng rng(7);
    for (int i = 0; i < 10; ++i) CHECK(sample_step(loop, 0, rng) == 0);

    // p = 1 forces the move out of the start state.
    auto forced = parse_model("lmc 1\nstates 3\ninitial 0\nmarkers 1\nobs 2 e1\n"
                              "trans 0 1 1\ntrans 1 1 0.7\ntrans 1 2 0.3\n"
                              "trans 2 2 0.3\ntrans 2 1 0.7\n");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng r(seed);
        CHECK(sample_step(forced, 0, r) == 1);
    }
}

TEST_CASE("sample_step: frequency matches the row") {
    auto chain = parse_model("lmc 1\nstates 3\ninitial 0\nmarkers 1\nobs 2 e1\n"
                             "trans 0 0 0.5\ntrans 0 1 0.5\n"
                             "trans 1 1 0.7\ntrans 1 2 0.3\n"
                             "trans 2 2 0.3\ntrans 2 1 0.7\n");
    Rng rng(42);
    int hits = 0;
    const int samples = 100'000;
    for (int i = 0; i < samples; ++i)
        if (sample_step(chain, 1, rng) == 2) ++hits;
    double fraction = static_cast<double>(hits) / samples;
    CHECK(std::abs(fraction - 0.3) < 0.01);
}

TEST_CASE("sampling frequency within total variation 0.02 on every state") {
    auto chain = gen_simple(0.37, 0.61);
    const int samples = 100'000;
    for (int s = 0; s < chain.state_count(); ++s) {
        Rng rng(1000 + s);
        std::map<int, int> counts;
        for (int i = 0; i < samples; ++i) ++counts[sample_step(chain, s, rng)];
        double tv = 0.0;
        for (const auto& t : chain.row(s))
            tv += std::abs(static_cast<double>(counts[t.target]) / samples - t.prob);
        CHECK(tv / 2 < 0.02);
    }
}

TEST_CASE("black box hides state and reports observations") {
    auto chain = gen_simple(0.5, 0.5);
    auto session = as_black_box(chain);
    CHECK(session.reset().empty());  // start state is unlabeled
    Rng rng(3);
    bool goal_seen = false;
    for (int i = 0; i < 200; ++i) {
        MarkerSet obs = session.step(rng);
        if (obs.has_e(1)) {
            goal_seen = true;
            CHECK(*session.current_state() == 2);
        }
    }
    CHECK(goal_seen);
}

TEST_CASE("black box rejects raw-labeled chains") {
    auto raw =
        parse_model("lmc 1\nstates 2\ninitial 0\nobs 0 a\nobs 1 b\ntrans 0 1 1\ntrans 1 1 1\n");
    CHECK_THROWS_AS(as_black_box(raw), std::invalid_argument);
}

TEST_CASE("equal chains and equal seeds give identical observation sequences") {
    auto chain_a = parse_model(kSimpleChain);
    auto chain_b = parse_model(kSimpleChain);
    for (std::uint64_t seed : {1ull, 9ull, 123456ull}) {
        auto sa = as_black_box(chain_a);
        auto sb = as_black_box(chain_b);
        Rng ra(seed), rb(seed);
        CHECK(sa.reset() == sb.reset());
        for (int i = 0; i < 500; ++i) CHECK(sa.step(ra) == sb.step(rb));
    }
}
