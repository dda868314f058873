#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dlt/errors.hpp"

namespace dlt {

/// Input normalization drift accepted (and silently removed) by validate().
inline constexpr double kEpsNorm = 1e-9;
/// Absolute slack on squared-coefficient tail comparisons.
inline constexpr double kEpsCmp = 1e-12;
/// Amplitudes at or below this are counted as zero.
inline constexpr double kEpsZero = 1e-12;
/// Completeness and probability-sum tolerance for measurement steps.
inline constexpr double kEpsComplete = 1e-12;

/// Positional amplitudes of a Schmidt-form state in a fixed product basis |j>|j>.
/// Unlike SchmidtVector these need not be sorted: the ladder keeps coefficients
/// at fixed basis positions even when an inserted value overtakes a neighbour.
using Amplitudes = std::vector<double>;

/// Ordered, normalized, non-negative Schmidt coefficients of a bipartite pure state.
///
/// Stored as amplitudes; all majorization arithmetic goes through squares().
class SchmidtVector {
   public:
    /// Checks every invariant and throws dlt::Error if one fails. The input is
    /// taken as-is (no renormalization beyond rounding, no sorting).
    explicit SchmidtVector(std::vector<double> amps);

    /// Stable descending sort of arbitrary non-negative amplitudes, then the checks above.
    static SchmidtVector sorted_from(std::span<const double> amps);

    std::size_t n() const noexcept {
        return amps_.size();
    }
    const std::vector<double> &amps() const noexcept {
        return amps_;
    }
    double operator[](std::size_t j) const {
        return amps_[j];
    }
    std::vector<double> squares() const;

    /// All entries strictly positive (above kEpsZero).
    bool source_grade() const noexcept;

    bool operator==(const SchmidtVector &) const = default;

   private:
    std::vector<double> amps_;
};

/// Parses raw user numbers into a SchmidtVector.
///
/// `squared` means the entries are eigenvalues of the reduced density matrix and
/// get square-rooted. Unsorted input is an error unless `autosort` is set.
SchmidtVector validate(std::span<const double> raw, bool squared, bool autosort);

struct MajorizationReport {
    bool holds = false;
    /// 1-based index of the first violated tail inequality.
    std::optional<std::size_t> failing_k;
    /// tail_margins[k-1] = sum_{j>=k} source_j^2 - sum_{j>=k} target_j^2.
    std::vector<double> tail_margins;

    bool operator==(const MajorizationReport &) const = default;
};

/// Tail-sum test of whether `source` can be turned into `target` with certainty.
MajorizationReport majorizes(const SchmidtVector &source, const SchmidtVector &target);

/// Same test on raw squared coefficients, sorting both first.
MajorizationReport majorizes_squares(std::span<const double> source_sq, std::span<const double> target_sq);

std::size_t effective_rank(const SchmidtVector &v);
std::size_t effective_rank(std::span<const double> amps);

}  // namespace dlt
