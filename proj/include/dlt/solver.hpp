#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "dlt/schmidt.hpp"

namespace dlt {

/// A measurement operator that is diagonal in the Schmidt basis, stored by its diagonal.
struct DiagonalKraus {
    std::vector<double> diag;

    static DiagonalKraus identity(std::size_t n) {
        return {std::vector<double>(n, 1.0)};
    }
    bool operator==(const DiagonalKraus &) const = default;
};

/// Basis relabeling applied by both parties: the coefficient at index j moves to index map[j].
using Permutation = std::vector<std::size_t>;

Permutation identity_permutation(std::size_t n);
Permutation transposition(std::size_t n, std::size_t a, std::size_t b);
bool is_permutation(const Permutation &p);
/// Coefficient j of `amps` lands at perm[j].
Amplitudes apply_permutation(const Permutation &perm, const Amplitudes &amps);

struct OutcomeBranch {
    DiagonalKraus op;
    double prob = 0.0;
    Permutation correction;
    /// State after the operator, renormalization and correction.
    Amplitudes post_state;

    bool operator==(const OutcomeBranch &) const = default;
};

enum class StepCase { CaseI, CaseII, TwoOutcome, Trivial };

std::string_view step_case_name(StepCase c);
StepCase step_case_from_name(std::string_view name);

/// One generalized measurement on party A followed by outcome-dependent relabeling.
struct MeasurementStep {
    std::vector<OutcomeBranch> branches;
    Amplitudes source;
    Amplitudes target;
    StepCase case_tag = StepCase::Trivial;
    /// Branches dropped because their probability fell below kEpsZero.
    std::size_t pruned_count = 0;

    std::size_t n() const noexcept {
        return source.size();
    }
    bool operator==(const MeasurementStep &) const = default;
};

/// Largest |sum_i op_i[j]^2 - 1| over basis indices j.
double completeness_deviation(const MeasurementStep &step);
/// |sum_i p_i - 1|.
double probability_sum_deviation(const MeasurementStep &step);

/// Single three-outcome measurement taking `source` to `target` in dimension 3.
///
/// The case split follows the middle coefficient: b1 >= b2 (ties included) uses
/// corrections {id, 1<->2, 1<->3}, otherwise {id, 1<->3, 2<->3}.
MeasurementStep solve3(const SchmidtVector &source, const SchmidtVector &target);

/// Forces one of the two three-dimensional constructions. Only meaningful on the
/// boundary b1 == b2 where both apply; used to compare them.
MeasurementStep solve3_with_case(const SchmidtVector &source, const SchmidtVector &target, StepCase which);

/// Two-outcome measurement in dimension 2; outcome 2 is followed by 1<->2.
MeasurementStep solve2(const SchmidtVector &source, const SchmidtVector &target);

}  // namespace dlt
