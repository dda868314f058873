#include "dlt/ladder.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "support.hpp"

using namespace dlt;

namespace {

SchmidtVector sq(std::vector<double> v) {
    return validate(v, true, false);
}

ErrorCode code_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InternalInvariant;
}

const SchmidtVector kSource = sq({0.4, 0.3, 0.2, 0.1});
const SchmidtVector kTarget = sq({0.55, 0.25, 0.15, 0.05});

}  // namespace

TEST(ladder, ladder_length) {
    ASSERT_EQ(ladder_length(2, 3), 1u);
    ASSERT_EQ(ladder_length(3, 3), 1u);
    for (std::size_t n = 3; n <= 40; n++) {
        ASSERT_EQ(ladder_length(n, 3), n / 2) << n;
        ASSERT_EQ(ladder_length(n, 2), n - 1) << n;
    }
    ASSERT_EQ(ladder_length(10, 4), 3u);
}

TEST(ladder, block_decompose_running_example) {
    auto dec = block_decompose(kSource, 3);
    ASSERT_NEAR(dec.block_norm * dec.block_norm, 0.6, 1e-15);
    auto b = dec.block.squares();
    ASSERT_NEAR(b[0], 0.5, 1e-15);
    ASSERT_NEAR(b[1], 1.0 / 3, 1e-15);
    ASSERT_NEAR(b[2], 1.0 / 6, 1e-15);
    ASSERT_EQ(dec.prefix.size(), 1u);
    ASSERT_TRUE(dec.suffix.empty());
    ASSERT_EQ(dec.range, (IndexRange{1, 3}));
    ASSERT_EQ(dec.order, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(ladder, block_decompose_errors) {
    ASSERT_EQ(code_of([] { block_decompose(kSource, 5); }), ErrorCode::BlockTooLarge);
    ASSERT_EQ(code_of([] { block_decompose(kSource, 1); }), ErrorCode::InvalidArgument);
    std::vector<double> amps{1.0, 0.0, 0.0};
    ASSERT_EQ(code_of([&] { block_decompose_range(amps, {1, 2}); }), ErrorCode::ZeroBlockNorm);
    ASSERT_EQ(code_of([&] { block_decompose_range(amps, {2, 2}); }), ErrorCode::IndexRangeInvalid);
}

TEST(ladder, block_decompose_range_sorts_unsorted_block) {
    std::vector<double> amps{std::sqrt(0.25), std::sqrt(0.35), std::sqrt(0.2), std::sqrt(0.2)};
    auto dec = block_decompose_range(amps, {0, 2});
    ASSERT_EQ(dec.order, (std::vector<std::size_t>{1, 0}));
    ASSERT_NEAR(dec.block[0] * dec.block[0], 0.35 / 0.6, 1e-15);
}

TEST(ladder, choose_omega_running_example) {
    auto dec = block_decompose(kSource, 3);
    std::vector<double> fixed{std::sqrt(0.15), std::sqrt(0.05)};
    auto omega = choose_omega(dec.block, fixed, dec.block_norm);
    auto w = omega.squares();
    ASSERT_NEAR(w[0], 2.0 / 3, 1e-15);
    ASSERT_NEAR(w[1], 0.25, 1e-15);
    ASSERT_NEAR(w[2], 1.0 / 12, 1e-15);
}

TEST(ladder, choose_omega_errors) {
    auto dec = block_decompose(kSource, 3);
    std::vector<double> one{0.1};
    ASSERT_EQ(code_of([&] { choose_omega(dec.block, one, dec.block_norm); }), ErrorCode::DimensionMismatch);
    std::vector<double> big{0.7, 0.6};
    ASSERT_EQ(code_of([&] { choose_omega(dec.block, big, dec.block_norm); }), ErrorCode::NormalizationUnderflow);
    std::vector<double> unsorted{0.1, 0.3};
    ASSERT_EQ(code_of([&] { choose_omega(dec.block, unsorted, dec.block_norm); }), ErrorCode::OmegaNotSorted);
    std::vector<double> head_too_small{0.5, 0.4};
    ASSERT_EQ(code_of([&] { choose_omega(dec.block, head_too_small, dec.block_norm); }), ErrorCode::OmegaNotSorted);
    std::vector<double> too_flat{std::sqrt(0.2), std::sqrt(0.19)};
    ASSERT_EQ(code_of([&] { choose_omega(dec.block, too_flat, dec.block_norm); }), ErrorCode::OmegaNotMajorizing);
    ASSERT_EQ(code_of([&] { choose_omega(dec.block, too_flat, 0.0); }), ErrorCode::ZeroBlockNorm);
}

TEST(ladder, chain_running_example) {
    auto chain = intermediate_chain(kSource, kTarget, 3);
    ASSERT_EQ(chain.steps, 2u);
    ASSERT_EQ(chain.basis_states.size(), 3u);
    std::vector<double> expected{0.4, 0.4, 0.15, 0.05};
    for (std::size_t j = 0; j < 4; j++) {
        ASSERT_NEAR(chain.basis_states[1][j] * chain.basis_states[1][j], expected[j], 1e-15);
    }
    ASSERT_EQ(chain.tilde_index, (std::vector<std::size_t>{1}));
    ASSERT_EQ(chain.blocks[0], (IndexRange{1, 3}));
    ASSERT_EQ(chain.blocks[1], (IndexRange{0, 2}));
    ASSERT_EQ(chain.basis_states[1][2], kTarget[2]);
    ASSERT_EQ(chain.basis_states[1][3], kTarget[3]);
    ASSERT_TRUE(check_chain(chain, kTarget).ok());
}

TEST(ladder, plan_running_example) {
    auto plan = plan_full(kSource, kTarget);
    ASSERT_EQ(plan.steps.size(), 2u);
    const auto &s1 = plan.steps[0];
    ASSERT_EQ(s1.case_tag, StepCase::CaseI);
    ASSERT_NEAR(s1.branches[0].prob, 23.0 / 35, 1e-12);
    ASSERT_NEAR(s1.branches[1].prob, 1.0 / 5, 1e-12);
    ASSERT_NEAR(s1.branches[2].prob, 1.0 / 7, 1e-12);
    // A 1<->2 swap inside the block {2, 3, 4} is a 2<->3 swap of the full state.
    ASSERT_EQ(s1.branches[1].correction, (Permutation{0, 2, 1, 3}));
    ASSERT_EQ(s1.branches[2].correction, (Permutation{0, 3, 2, 1}));
    for (const auto &b : s1.branches) {
        ASSERT_NEAR(b.op.diag[0], std::sqrt(b.prob), 1e-15);
    }
    const auto &s2 = plan.steps[1];
    ASSERT_EQ(s2.case_tag, StepCase::TwoOutcome);
    ASSERT_NEAR(s2.branches[0].prob, 0.5, 1e-12);
    ASSERT_NEAR(s2.branches[1].prob, 0.5, 1e-12);
    ASSERT_NEAR(s2.branches[0].op.diag[3], std::sqrt(0.5), 1e-15);
}

TEST(ladder, embed_step_relabels_block_indices) {
    auto dec = block_decompose(kSource, 3);
    MeasurementStep block;
    block.source = dec.block.amps();
    block.target = dec.block.amps();
    block.case_tag = StepCase::CaseI;
    block.branches.push_back({DiagonalKraus{{0.6, 0.6, 0.6}}, 0.36, {0, 1, 2}, {}});
    block.branches.push_back({DiagonalKraus{{0.8, 0.8, 0.8}}, 0.64, {2, 1, 0}, {}});
    auto full = embed_step(block, dec, 4);
    ASSERT_EQ(full.branches[1].correction, (Permutation{0, 3, 2, 1}));
    ASSERT_NEAR(full.branches[1].op.diag[0], 0.8, 1e-15);
    ASSERT_NEAR(full.source[0], kSource[0], 1e-15);
    ASSERT_NEAR(full.source[3], kSource[3], 1e-15);

    BlockDecomposition bad = dec;
    bad.prefix.clear();
    ASSERT_EQ(code_of([&] { embed_step(block, bad, 4); }), ErrorCode::IndexRangeInvalid);
}

TEST(ladder, identity_plan_is_single_trivial_step) {
    auto plan = plan_full(kSource, kSource);
    ASSERT_EQ(plan.steps.size(), 1u);
    ASSERT_EQ(plan.steps[0].case_tag, StepCase::Trivial);
    ASSERT_EQ(plan.steps[0].branches.size(), 1u);
}

TEST(ladder, three_dim_plan_is_one_step) {
    auto plan = plan_full(sq({0.4, 0.35, 0.25}), sq({0.5, 0.4, 0.1}));
    ASSERT_EQ(plan.steps.size(), 1u);
    ASSERT_EQ(plan.steps[0].case_tag, StepCase::CaseII);
}

TEST(ladder, plan_rejects_bad_input) {
    ASSERT_EQ(code_of([] { plan_full(kTarget, kSource); }), ErrorCode::NotMajorized);
    ASSERT_EQ(code_of([] { plan_full(kSource, kTarget, 4); }), ErrorCode::InvalidArgument);
    ASSERT_EQ(code_of([] { plan_full(kSource, sq({0.5, 0.5})); }), ErrorCode::DimensionMismatch);
}

TEST(ladder, inserted_coefficient_can_overtake_its_neighbour) {
    auto source = sq({0.25, 0.25, 0.25, 0.25});
    auto target = sq({0.3, 0.3, 0.2, 0.2});
    auto chain = build_chain(source, target, 3);
    ASSERT_NEAR(chain.basis_states[1][1] * chain.basis_states[1][1], 0.35, 1e-15);
    auto check = check_chain(chain, target);
    ASSERT_FALSE(check.ok());
    ASSERT_TRUE(check.links[0].positional_ok);
    ASSERT_TRUE(check.links[0].suffix_fixed);
    ASSERT_TRUE(check.links[1].positional_ok);
    ASSERT_FALSE(check.links[1].block_majorized);
    ASSERT_EQ(code_of([&] { plan_full(source, target); }), ErrorCode::ChainInvariantViolated);
}

TEST(ladder, positional_inequalities_hold_on_random_pairs) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 3000; trial++) {
        std::size_t n = 3 + static_cast<std::size_t>(trial % 14);
        auto p = dlt_test::random_feasible_pair(n, rng);
        auto chain = build_chain(p.source, p.target, 3);
        auto check = check_chain(chain, p.target);
        for (const auto &link : check.links) {
            ASSERT_TRUE(link.positional_ok) << "n=" << n << " link " << link.k;
            ASSERT_TRUE(link.suffix_fixed);
            ASSERT_TRUE(link.confined_to_block);
        }
    }
}

TEST(ladder, successful_random_plans_have_ladder_length_steps) {
    std::mt19937_64 rng(37);
    int built = 0;
    for (int trial = 0; trial < 2000; trial++) {
        std::size_t n = 3 + static_cast<std::size_t>(trial % 10);
        auto p = dlt_test::random_feasible_pair(n, rng);
        try {
            auto plan = plan_full(p.source, p.target);
            ASSERT_EQ(plan.steps.size(), n / 2);
            built++;
        } catch (const Error &e) {
            ASSERT_EQ(e.code(), ErrorCode::ChainInvariantViolated) << e.what();
        }
    }
    ASSERT_GT(built, 100);
}

TEST(ladder, greatest_first_collapse_certificate) {
    auto result = greatest_first_chain(sq({0.4, 0.3, 0.3}), sq({0.7, 0.2, 0.1}), 2);
    ASSERT_TRUE(std::holds_alternative<InfeasibilityCertificate>(result));
    const auto &cert = std::get<InfeasibilityCertificate>(result);
    ASSERT_EQ(cert.k, 1u);
    ASSERT_EQ(cert.index, 1u);
    ASSERT_NEAR(cert.tilde_squared, 0.0, 1e-12);
    ASSERT_EQ(cert.intermediate_rank, 2u);
    ASSERT_EQ(cert.target_rank, 3u);
    ASSERT_EQ(cert.intermediate[1], 0.0);
}

TEST(ladder, greatest_first_running_example_has_no_collapse) {
    auto result = greatest_first_chain(kSource, kTarget, 3);
    ASSERT_TRUE(std::holds_alternative<IntermediateChain>(result));
    const auto &chain = std::get<IntermediateChain>(result);
    ASSERT_EQ(chain.steps, 2u);
    ASSERT_NEAR(chain.tilde_values[0] * chain.tilde_values[0], 0.1, 1e-15);
}

TEST(ladder, greatest_first_identity) {
    auto result = greatest_first_chain(kSource, kSource, 2);
    ASSERT_TRUE(std::holds_alternative<IntermediateChain>(result));
}

TEST(ladder, two_block_plans) {
    std::mt19937_64 rng(41);
    int built = 0;
    for (int trial = 0; trial < 500; trial++) {
        std::size_t n = 2 + static_cast<std::size_t>(trial % 8);
        auto p = dlt_test::random_feasible_pair(n, rng);
        try {
            auto plan = plan_full(p.source, p.target, 2);
            ASSERT_EQ(plan.steps.size(), n - 1);
            built++;
        } catch (const Error &e) {
            ASSERT_EQ(e.code(), ErrorCode::ChainInvariantViolated) << e.what();
        }
    }
    ASSERT_GT(built, 50);
}
