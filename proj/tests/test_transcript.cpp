#include "dlt/transcript.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "dlt/commands.hpp"
#include "gtest/gtest.h"
#include "support.hpp"

using namespace dlt;

namespace {

ProblemSpec running_example() {
    return {{0.4, 0.3, 0.2, 0.1}, {0.55, 0.25, 0.15, 0.05}, true, false};
}

}  // namespace

TEST(transcript, parse_problem) {
    auto p = parse_problem(R"({"source": [0.5, 0.5], "target": [1, 0], "squared": true})");
    ASSERT_EQ(p.source, (std::vector<double>{0.5, 0.5}));
    ASSERT_EQ(p.target, (std::vector<double>{1.0, 0.0}));
    ASSERT_TRUE(p.squared);
    ASSERT_FALSE(p.autosort);
}

TEST(transcript, parse_problem_errors) {
    ASSERT_THROW(parse_problem("not json"), Error);
    ASSERT_THROW(parse_problem("[1, 2]"), Error);
    ASSERT_THROW(parse_problem(R"({"source": [0.5, 0.5]})"), Error);
    ASSERT_THROW(parse_problem(R"({"source": ["a"], "target": [1]})"), Error);
}

TEST(transcript, plan_round_trip) {
    auto result = cmd_plan(running_example());
    ASSERT_EQ(result.exit_code, 0);
    auto text = serialize(result.transcript);
    auto back = parse_transcript(text);
    ASSERT_EQ(back, result.transcript);
    ASSERT_EQ(serialize(back), text);
}

TEST(transcript, simulate_round_trip) {
    auto result = cmd_simulate(running_example(), 2000, 17, 2);
    ASSERT_EQ(result.exit_code, 0);
    auto back = parse_transcript(serialize(result.transcript));
    ASSERT_EQ(back, result.transcript);
    ASSERT_EQ(back.seed, 17u);
}

TEST(transcript, demo_round_trip) {
    ProblemSpec spec{{0.4, 0.3, 0.3}, {0.7, 0.2, 0.1}, true, false};
    auto result = cmd_demo_infeasible(spec, 2);
    auto back = parse_transcript(serialize(result.transcript));
    ASSERT_EQ(back, result.transcript);
    ASSERT_TRUE(back.greatest_first->collapsed);
}

TEST(transcript, error_round_trip) {
    ProblemSpec spec{{0.25, 0.25, 0.25, 0.25}, {0.3, 0.3, 0.2, 0.2}, true, false};
    auto result = cmd_plan(spec);
    ASSERT_EQ(result.exit_code, 3);
    auto back = parse_transcript(serialize(result.transcript));
    ASSERT_EQ(back, result.transcript);
    ASSERT_EQ(back.error->code, "ChainInvariantViolated");
}

TEST(transcript, non_finite_values_survive) {
    Transcript t;
    t.command = "plan";
    t.verification = VerificationSummary{false, 0, {{"post_state", 1, std::numeric_limits<double>::infinity(), 1e-10,
                                                     false}}};
    auto back = parse_transcript(serialize(t));
    ASSERT_TRUE(std::isinf(back.verification->checks[0].max_deviation));
    ASSERT_EQ(back, t);
}

TEST(transcript, floats_round_trip_exactly) {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 200; trial++) {
        Transcript t;
        t.command = "check";
        t.problem.source = dlt_test::random_simplex(7, rng);
        t.problem.target = dlt_test::random_simplex(7, rng);
        auto back = parse_transcript(serialize(t));
        ASSERT_EQ(back.problem.source, t.problem.source);
        ASSERT_EQ(back.problem.target, t.problem.target);
    }
}

TEST(transcript, serialized_amplitudes_revalidate_bit_exactly) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 200; trial++) {
        auto v = dlt_test::from_squares(dlt_test::random_simplex(2 + trial % 10, rng));
        Transcript t;
        t.problem.source = v.amps();
        auto back = parse_transcript(serialize(t));
        ASSERT_EQ(validate(back.problem.source, false, false), v);
    }
}

TEST(transcript, malformed_transcript) {
    ASSERT_THROW(parse_transcript("{}"), Error);
    ASSERT_THROW(parse_transcript("{"), Error);
}
