#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dlt/schmidt.hpp"
#include "dlt/solver.hpp"

namespace dlt {

/// Contiguous basis indices [first, first + size), 0-based.
struct IndexRange {
    std::size_t first = 0;
    std::size_t size = 0;

    std::size_t end() const noexcept {
        return first + size;
    }
    bool operator==(const IndexRange &) const = default;
};

/// A state split into untouched coefficients and one normalized active block.
struct BlockDecomposition {
    Amplitudes prefix;
    Amplitudes suffix;
    double block_norm = 0.0;
    /// The block's coefficients divided by block_norm, sorted non-increasing.
    SchmidtVector block;
    IndexRange range;
    /// order[a] is the offset inside `range` holding sorted coefficient a.
    std::vector<std::size_t> order;
};

/// Splits off the last `m` coefficients of `state`.
BlockDecomposition block_decompose(const SchmidtVector &state, std::size_t m);

/// Splits off an arbitrary range of positional amplitudes. The block may be
/// unsorted in place; `order` records how it was sorted.
BlockDecomposition block_decompose_range(std::span<const double> amps, IndexRange range);

/// Target block that fixes the m-1 given target coefficients and closes the
/// norm with the leading entry. `target_tail` holds unscaled amplitudes.
SchmidtVector choose_omega(const SchmidtVector &block_source, std::span<const double> target_tail, double block_norm);

struct IntermediateChain {
    std::size_t m = 0;
    std::size_t steps = 0;
    /// states.size() == steps + 1 in both views.
    std::vector<Amplitudes> basis_states;
    std::vector<SchmidtVector> states;
    /// Inserted coefficient of each intermediate state and its basis index.
    std::vector<double> tilde_values;
    std::vector<std::size_t> tilde_index;
    /// blocks[k] is the range touched by the link states[k] -> states[k + 1].
    std::vector<IndexRange> blocks;
};

/// Number of links the smallest-first ladder needs for dimension n and block size m.
std::size_t ladder_length(std::size_t n, std::size_t m);

struct LinkCheck {
    std::size_t k = 0;
    /// Whole-state majorization on sorted squares.
    bool state_majorized = false;
    /// Majorization of the active block alone (sorted squares, unnormalized).
    bool block_majorized = false;
    /// Smallest positional tail margin inside the block; the m = 3 instance of
    /// these are the three inequalities a ladder link has to satisfy.
    double positional_margin = 0.0;
    bool positional_ok = false;
    bool confined_to_block = false;
    bool suffix_fixed = false;

    bool ok() const noexcept {
        return state_majorized && block_majorized && positional_ok && confined_to_block && suffix_fixed;
    }
};

struct ChainCheck {
    std::vector<LinkCheck> links;

    bool ok() const noexcept;
    /// First failing link, rendered for error messages.
    std::string describe_failure() const;
};

/// Builds the smallest-first ladder without verifying it.
IntermediateChain build_chain(const SchmidtVector &source, const SchmidtVector &target, std::size_t m);
ChainCheck check_chain(const IntermediateChain &chain, const SchmidtVector &target);

/// build_chain + check_chain; throws ChainInvariantViolated when any link fails.
IntermediateChain intermediate_chain(const SchmidtVector &source, const SchmidtVector &target, std::size_t m);

struct InfeasibilityCertificate {
    std::size_t k = 0;
    /// Basis index (0-based) of the coefficient that vanished.
    std::size_t index = 0;
    /// Raw squared value before clamping; may be negative.
    double tilde_squared = 0.0;
    std::size_t intermediate_rank = 0;
    std::size_t target_rank = 0;
    Amplitudes intermediate;
};

using GreatestFirstResult = std::variant<IntermediateChain, InfeasibilityCertificate>;

/// Variant of the ladder that fixes the largest coefficients first. It exists to
/// show where that ordering loses Schmidt rank; the chain it returns is not checked.
GreatestFirstResult greatest_first_chain(const SchmidtVector &source, const SchmidtVector &target, std::size_t m);

struct LadderPlan {
    IntermediateChain chain;
    std::vector<MeasurementStep> steps;
    SchmidtVector source;
    SchmidtVector target;
};

/// Lifts a block measurement into dimension n: untouched indices get sqrt(p_i),
/// the correction is extended by the identity.
MeasurementStep embed_step(const MeasurementStep &block_step, const BlockDecomposition &decomposition, std::size_t n);

/// Full protocol from source to target using blocks of size m (2 or 3).
/// With m = 3 a non-trivial plan has floor(n/2) steps.
LadderPlan plan_full(const SchmidtVector &source, const SchmidtVector &target, std::size_t m = 3);

}  // namespace dlt
