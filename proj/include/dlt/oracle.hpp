#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dlt/ladder.hpp"

namespace dlt {

/// Full bipartite state: amp(j, k) is the coefficient of |j>_A |k>_B.
///
/// Schmidt-form states are diagonal, but nothing here assumes it, so an
/// operator that breaks the Schmidt form shows up as off-diagonal weight.
struct FullState {
    Eigen::MatrixXd amp;

    static FullState from_schmidt(const Amplitudes &amps);
    std::size_t n() const {
        return static_cast<std::size_t>(amp.rows());
    }
    double norm() const {
        return amp.norm();
    }
    /// Eigenvalues of rho_A = amp * amp^T, sorted non-increasing.
    std::vector<double> reduced_spectrum() const;
    /// Largest |entry| of (this - other).
    double distance(const FullState &other) const;
};

enum class Party { A, B };

struct KrausOutcome {
    FullState state;
    double prob = 0.0;
};

/// M|psi>/sqrt(p) with p = <psi|M^T M|psi>. A zero-probability outcome returns
/// the unnormalized (zero) state and p = 0.
KrausOutcome apply_kraus(const FullState &state, const DiagonalKraus &op, Party party = Party::A);

/// The same relabeling applied by both parties.
FullState apply_local_permutation(const FullState &state, const Permutation &perm);

/// Largest dimension the full-matrix oracle accepts.
inline constexpr std::size_t kMaxOracleDimension = 64;

/// Oracle tolerances.
inline constexpr double kOracleTol = 1e-10;
inline constexpr double kTrajectoryTol = 1e-8;

struct CheckResult {
    std::string name;
    /// Step index, or -1 for whole-plan checks.
    int step = -1;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    /// Number of complete branch paths propagated end to end (0 if skipped).
    std::size_t paths_checked = 0;

    bool passed() const;
    /// Worst deviation per check name, in first-seen order.
    std::vector<CheckResult> summary() const;
};

/// Plans with more outcome paths than this are checked step by step only.
inline constexpr std::size_t kMaxEnumeratedPaths = 4096;

/// Recomputes every step of `plan` with full matrices and reports, per check, the
/// largest deviation seen. Never throws on a defective plan.
VerificationReport verify_plan(const LadderPlan &plan);

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::uint64_t shot = 0;
    /// (step index, branch index) for each step.
    std::vector<std::pair<std::size_t, std::size_t>> path;
    FullState final_state;
    bool matched_target = false;
    double final_deviation = 0.0;
};

/// Replays one shot. The shot's random stream depends only on (seed, shot).
TrajectoryRecord run_trajectory(const LadderPlan &plan, std::uint64_t seed, std::uint64_t shot);

struct FrequencyReport {
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    /// branch_counts[k][i]: how often step k produced branch i.
    std::vector<std::vector<std::uint64_t>> branch_counts;
    /// Schmidt-level branch probabilities from the plan.
    std::vector<std::vector<double>> analytic;
    /// Path key "i0.i1.i2..." -> count.
    std::map<std::string, std::uint64_t> path_counts;
    std::uint64_t matched = 0;
    double max_final_deviation = 0.0;

    double match_rate() const {
        return shots == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(shots);
    }
    bool operator==(const FrequencyReport &) const = default;
};

/// Monte Carlo over `shots` trajectories. Output is identical for any `threads`
/// (0 picks the hardware concurrency). Throws InvalidArgument for shots = 0 or a
/// plan above kMaxOracleDimension.
FrequencyReport sample_trajectories(
    const LadderPlan &plan, std::uint64_t shots, std::uint64_t seed, unsigned threads = 0);

}  // namespace dlt
