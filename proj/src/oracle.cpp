#include "dlt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <thread>

namespace dlt {

FullState FullState::from_schmidt(const Amplitudes &amps) {
    FullState s;
    auto n = static_cast<Eigen::Index>(amps.size());
    s.amp = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; j++) {
        s.amp(j, j) = amps[static_cast<std::size_t>(j)];
    }
    return s;
}

std::vector<double> FullState::reduced_spectrum() const {
    Eigen::MatrixXd rho = amp * amp.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rho, Eigen::EigenvaluesOnly);
    const auto &ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

double FullState::distance(const FullState &other) const {
    if (amp.rows() != other.amp.rows() || amp.cols() != other.amp.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return (amp - other.amp).cwiseAbs().maxCoeff();
}

KrausOutcome apply_kraus(const FullState &state, const DiagonalKraus &op, Party party) {
    if (op.diag.size() != state.n()) {
        throw Error(
            ErrorCode::DimensionMismatch, "operator of dimension " + std::to_string(op.diag.size()) +
                                              " applied to a state of dimension " + std::to_string(state.n()));
    }
    Eigen::Map<const Eigen::VectorXd> d(op.diag.data(), static_cast<Eigen::Index>(op.diag.size()));
    KrausOutcome out;
    if (party == Party::A) {
        out.state.amp = d.asDiagonal() * state.amp;
    } else {
        out.state.amp = state.amp * d.asDiagonal();
    }
    out.prob = out.state.amp.squaredNorm();
    if (out.prob > kEpsZero) {
        out.state.amp /= std::sqrt(out.prob);
    }
    return out;
}

FullState apply_local_permutation(const FullState &state, const Permutation &perm) {
    auto n = state.amp.rows();
    FullState out;
    out.amp = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; j++) {
        for (Eigen::Index k = 0; k < n; k++) {
            auto pj = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]);
            auto pk = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(k)]);
            out.amp(pj, pk) = state.amp(j, k);
        }
    }
    return out;
}

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.passed; });
}

std::vector<CheckResult> VerificationReport::summary() const {
    std::vector<CheckResult> out;
    for (const auto &c : checks) {
        auto it = std::find_if(out.begin(), out.end(), [&](const CheckResult &o) { return o.name == c.name; });
        if (it == out.end()) {
            out.push_back(c);
            continue;
        }
        if (!c.passed && it->passed) {
            *it = c;
        } else if (c.passed == it->passed && c.max_deviation > it->max_deviation) {
            *it = c;
        }
    }
    return out;
}

namespace {

double vector_distance(const Amplitudes &a, const Amplitudes &b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); j++) {
        worst = std::max(worst, std::abs(a[j] - b[j]));
    }
    return worst;
}

void record(VerificationReport &report, std::string name, int step, double deviation, double tolerance) {
    bool ok = std::isfinite(deviation) && deviation <= tolerance;
    report.checks.push_back({std::move(name), step, deviation, tolerance, ok});
}

/// Structural sanity; later checks index into these vectors.
bool step_well_formed(const MeasurementStep &step, std::size_t n, double &worst_entry) {
    worst_entry = 0.0;
    bool ok = !step.branches.empty() && step.source.size() == n && step.target.size() == n;
    for (const auto &b : step.branches) {
        if (b.op.diag.size() != n || b.correction.size() != n || !is_permutation(b.correction)) {
            worst_entry = std::numeric_limits<double>::infinity();
            return false;
        }
        for (double x : b.op.diag) {
            if (!std::isfinite(x)) {
                worst_entry = std::numeric_limits<double>::infinity();
                return false;
            }
            worst_entry = std::max(worst_entry, -x);
        }
        if (!std::isfinite(b.prob) || b.prob < 0.0 || b.prob > 1.0) {
            worst_entry = std::max(worst_entry, std::abs(b.prob));
        }
    }
    return ok;
}

void propagate_paths(
    const LadderPlan &plan, std::size_t k, const FullState &state, double path_prob, const FullState &target,
    double &worst_final, double &prob_total, std::size_t &paths) {
    if (k == plan.steps.size()) {
        worst_final = std::max(worst_final, state.distance(target));
        prob_total += path_prob;
        paths++;
        return;
    }
    for (const auto &b : plan.steps[k].branches) {
        KrausOutcome o = apply_kraus(state, b.op, Party::A);
        FullState next = apply_local_permutation(o.state, b.correction);
        propagate_paths(plan, k + 1, next, path_prob * o.prob, target, worst_final, prob_total, paths);
    }
}

}  // namespace

VerificationReport verify_plan(const LadderPlan &plan) {
    VerificationReport report;
    const std::size_t n = plan.source.n();
    const auto &chain = plan.chain;

    record(report, "dimension", -1, n <= kMaxOracleDimension ? 0.0 : static_cast<double>(n), 0.0);
    if (n > kMaxOracleDimension) {
        return report;
    }
    double count_dev = plan.steps.size() == chain.steps && chain.basis_states.size() == chain.steps + 1 ? 0.0 : 1.0;
    record(report, "step_count", -1, count_dev, 0.0);
    if (count_dev != 0.0) {
        return report;
    }
    record(report, "chain_endpoints", -1,
           std::max(vector_distance(chain.basis_states.front(), plan.source.amps()),
                    vector_distance(chain.basis_states.back(), plan.target.amps())),
           0.0);

    bool structurally_sound = true;
    for (std::size_t k = 0; k < plan.steps.size(); k++) {
        const MeasurementStep &step = plan.steps[k];
        const int idx = static_cast<int>(k);
        double worst_entry = 0.0;
        bool ok = step_well_formed(step, n, worst_entry);
        record(report, "operator_validity", idx, ok ? worst_entry : std::numeric_limits<double>::infinity(), 0.0);
        if (!ok) {
            structurally_sound = false;
            continue;
        }
        record(report, "chain_link", idx,
               std::max(vector_distance(step.source, chain.basis_states[k]),
                        vector_distance(step.target, chain.basis_states[k + 1])),
               kOracleTol);
        record(report, "completeness", idx, completeness_deviation(step), kEpsComplete);
        record(report, "probability_sum", idx, probability_sum_deviation(step), kEpsComplete);

        FullState before = FullState::from_schmidt(chain.basis_states[k]);
        FullState expected = FullState::from_schmidt(chain.basis_states[k + 1]);
        std::vector<double> expected_spectrum = chain.states[k + 1].squares();

        double prob_dev = 0.0;
        double state_dev = 0.0;
        double spectrum_dev = 0.0;
        for (const auto &b : step.branches) {
            KrausOutcome o = apply_kraus(before, b.op, Party::A);
            prob_dev = std::max(prob_dev, std::abs(o.prob - b.prob));
            if (o.prob <= kEpsZero) {
                state_dev = std::numeric_limits<double>::infinity();
                continue;
            }
            FullState after = apply_local_permutation(o.state, b.correction);
            state_dev = std::max(state_dev, after.distance(expected));
            state_dev = std::max(state_dev, after.distance(FullState::from_schmidt(b.post_state)));
            std::vector<double> spectrum = after.reduced_spectrum();
            for (std::size_t j = 0; j < n; j++) {
                spectrum_dev = std::max(spectrum_dev, std::abs(spectrum[j] - expected_spectrum[j]));
            }
        }
        record(report, "branch_probability", idx, prob_dev, kOracleTol);
        record(report, "post_state", idx, state_dev, kOracleTol);
        record(report, "reduced_spectrum", idx, spectrum_dev, kOracleTol);
    }

    if (!structurally_sound) {
        return report;
    }
    std::size_t total_paths = 1;
    for (const auto &s : plan.steps) {
        total_paths *= s.branches.size();
        if (total_paths > kMaxEnumeratedPaths) {
            break;
        }
    }
    if (total_paths <= kMaxEnumeratedPaths) {
        double worst_final = 0.0;
        double prob_total = 0.0;
        FullState target = FullState::from_schmidt(plan.target.amps());
        propagate_paths(plan, 0, FullState::from_schmidt(plan.source.amps()), 1.0, target, worst_final, prob_total,
                        report.paths_checked);
        record(report, "end_to_end_state", -1, worst_final, kOracleTol);
        record(report, "path_probability_sum", -1, std::abs(prob_total - 1.0), kOracleTol);
    }
    return report;
}

TrajectoryRecord run_trajectory(const LadderPlan &plan, std::uint64_t seed, std::uint64_t shot) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(shot),
        static_cast<std::uint32_t>(shot >> 32)};
    std::mt19937_64 engine(seq);
    // Top 53 bits -> [0, 1); mt19937_64 output is fixed by the standard, so this
    // stays reproducible across standard libraries.

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.shot = shot;
    FullState state = FullState::from_schmidt(plan.source.amps());
    for (std::size_t k = 0; k < plan.steps.size(); k++) {
        const auto &branches = plan.steps[k].branches;
        double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        std::vector<KrausOutcome> outcomes;
        outcomes.reserve(branches.size());
        for (const auto &b : branches) {
            outcomes.push_back(apply_kraus(state, b.op, Party::A));
        }
        std::size_t chosen = branches.size() - 1;
        double cumulative = 0.0;
        for (std::size_t i = 0; i < branches.size(); i++) {
            cumulative += outcomes[i].prob;
            if (u < cumulative) {
                chosen = i;
                break;
            }
        }
        rec.path.emplace_back(k, chosen);
        state = apply_local_permutation(outcomes[chosen].state, branches[chosen].correction);
    }
    rec.final_deviation = state.distance(FullState::from_schmidt(plan.target.amps()));
    rec.matched_target = rec.final_deviation <= kTrajectoryTol;
    rec.final_state = std::move(state);
    return rec;
}

namespace {

FrequencyReport empty_report(const LadderPlan &plan, std::uint64_t seed) {
    FrequencyReport r;
    r.seed = seed;
    for (const auto &s : plan.steps) {
        r.branch_counts.emplace_back(s.branches.size(), 0);
        std::vector<double> probs;
        for (const auto &b : s.branches) {
            probs.push_back(b.prob);
        }
        r.analytic.push_back(std::move(probs));
    }
    return r;
}

void tally(const LadderPlan &plan, std::uint64_t seed, std::uint64_t begin, std::uint64_t end, FrequencyReport &out) {
    std::string key;
    for (std::uint64_t shot = begin; shot < end; shot++) {
        TrajectoryRecord rec = run_trajectory(plan, seed, shot);
        key.clear();
        for (const auto &[k, i] : rec.path) {
            out.branch_counts[k][i]++;
            if (!key.empty()) {
                key += '.';
            }
            key += std::to_string(i);
        }
        out.path_counts[key]++;
        out.shots++;
        if (rec.matched_target) {
            out.matched++;
        }
        out.max_final_deviation = std::max(out.max_final_deviation, rec.final_deviation);
    }
}

}  // namespace

FrequencyReport sample_trajectories(const LadderPlan &plan, std::uint64_t shots, std::uint64_t seed, unsigned threads) {
    if (shots == 0) {
        throw Error(ErrorCode::InvalidArgument, "shots must be at least 1");
    }
    if (plan.source.n() > kMaxOracleDimension) {
        throw Error(ErrorCode::InvalidArgument, "dimension " + std::to_string(plan.source.n()) +
                                                    " exceeds the oracle limit of " +
                                                    std::to_string(kMaxOracleDimension));
    }
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, shots));

    std::vector<FrequencyReport> parts(threads, empty_report(plan, seed));
    std::vector<std::thread> workers;
    std::uint64_t chunk = shots / threads;
    std::uint64_t extra = shots % threads;
    std::uint64_t begin = 0;
    for (unsigned t = 0; t < threads; t++) {
        std::uint64_t end = begin + chunk + (t < extra ? 1 : 0);
        workers.emplace_back(tally, std::cref(plan), seed, begin, end, std::ref(parts[t]));
        begin = end;
    }
    for (auto &w : workers) {
        w.join();
    }

    FrequencyReport total = empty_report(plan, seed);
    for (const auto &p : parts) {
        total.shots += p.shots;
        total.matched += p.matched;
        total.max_final_deviation = std::max(total.max_final_deviation, p.max_final_deviation);
        for (std::size_t k = 0; k < p.branch_counts.size(); k++) {
            for (std::size_t i = 0; i < p.branch_counts[k].size(); i++) {
                total.branch_counts[k][i] += p.branch_counts[k][i];
            }
        }
        for (const auto &[key, count] : p.path_counts) {
            total.path_counts[key] += count;
        }
    }
    return total;
}

}  // namespace dlt
