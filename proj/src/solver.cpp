#include "dlt/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace dlt {

Permutation identity_permutation(std::size_t n) {
    Permutation p(n);
    for (std::size_t j = 0; j < n; j++) {
        p[j] = j;
    }
    return p;
}

Permutation transposition(std::size_t n, std::size_t a, std::size_t b) {
    Permutation p = identity_permutation(n);
    std::swap(p[a], p[b]);
    return p;
}

bool is_permutation(const Permutation &p) {
    std::vector<bool> seen(p.size(), false);
    for (std::size_t x : p) {
        if (x >= p.size() || seen[x]) {
            return false;
        }
        seen[x] = true;
    }
    return true;
}

Amplitudes apply_permutation(const Permutation &perm, const Amplitudes &amps) {
    Amplitudes out(amps.size(), 0.0);
    for (std::size_t j = 0; j < amps.size(); j++) {
        out[perm[j]] = amps[j];
    }
    return out;
}

std::string_view step_case_name(StepCase c) {
    switch (c) {
        case StepCase::CaseI:
            return "CASE_I";
        case StepCase::CaseII:
            return "CASE_II";
        case StepCase::TwoOutcome:
            return "TWO_OUTCOME";
        case StepCase::Trivial:
            return "TRIVIAL";
    }
    return "TRIVIAL";
}

StepCase step_case_from_name(std::string_view name) {
    for (StepCase c : {StepCase::CaseI, StepCase::CaseII, StepCase::TwoOutcome, StepCase::Trivial}) {
        if (step_case_name(c) == name) {
            return c;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown step case '" + std::string(name) + "'");
}

double completeness_deviation(const MeasurementStep &step) {
    double worst = 0.0;
    for (std::size_t j = 0; j < step.n(); j++) {
        double s = 0.0;
        for (const auto &b : step.branches) {
            s += b.op.diag[j] * b.op.diag[j];
        }
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

double probability_sum_deviation(const MeasurementStep &step) {
    double s = 0.0;
    for (const auto &b : step.branches) {
        s += b.prob;
    }
    return std::abs(s - 1.0);
}

namespace {

struct RawBranch {
    double prob;
    std::vector<double> ratios;
    Permutation correction;
};

MeasurementStep trivial_step(const SchmidtVector &source) {
    MeasurementStep step;
    step.source = source.amps();
    step.target = source.amps();
    step.case_tag = StepCase::Trivial;
    step.branches.push_back({DiagonalKraus::identity(source.n()), 1.0, identity_permutation(source.n()), source.amps()});
    return step;
}

bool same_state(const SchmidtVector &a, const SchmidtVector &b) {
    for (std::size_t j = 0; j < a.n(); j++) {
        if (std::abs(a[j] * a[j] - b[j] * b[j]) > kEpsCmp) {
            return false;
        }
    }
    return true;
}

void check_pair(const SchmidtVector &source, const SchmidtVector &target, std::size_t dim) {
    if (source.n() != dim || target.n() != dim) {
        throw Error(
            ErrorCode::DimensionMismatch,
            "expected dimension " + std::to_string(dim) + ", got " + std::to_string(source.n()) + " and " +
                std::to_string(target.n()));
    }
    auto report = majorizes(source, target);
    if (!report.holds) {
        throw Error(ErrorCode::NotMajorized, "tail inequality fails at k=" + std::to_string(*report.failing_k));
    }
}

void check_source_positive(const SchmidtVector &source) {
    for (std::size_t j = 0; j < source.n(); j++) {
        if (source[j] <= kEpsZero) {
            throw Error(ErrorCode::SourceHasZero, "source coefficient " + std::to_string(j + 1) + " is zero");
        }
    }
}

/// num/den with a zero denominator read as the degenerate "nothing to move" case.
double guarded_ratio(double num, double den) {
    if (den < kEpsZero) {
        return 0.0;
    }
    return num / den;
}

double clamp_probability(double p, std::string_view what) {
    if (p < -kEpsCmp || p > 1.0 + kEpsCmp || !std::isfinite(p)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << " = " << p << " outside [0, 1]";
        throw Error(ErrorCode::InternalInvariant, msg.str());
    }
    return std::clamp(p, 0.0, 1.0);
}

void require_order(std::initializer_list<double> chain, std::string_view label) {
    const double *prev = nullptr;
    for (const double &x : chain) {
        if (prev != nullptr && *prev < x - kEpsCmp) {
            throw Error(ErrorCode::InternalInvariant, "parameter ordering " + std::string(label) + " violated");
        }
        prev = &x;
    }
}

MeasurementStep assemble(
    const SchmidtVector &source, const SchmidtVector &target, StepCase tag, std::vector<RawBranch> raw) {
    MeasurementStep step;
    step.source = source.amps();
    step.target = target.amps();
    step.case_tag = tag;
    for (auto &r : raw) {
        if (r.prob < kEpsZero) {
            step.pruned_count++;
            continue;
        }
        OutcomeBranch branch;
        double root = std::sqrt(r.prob);
        branch.op.diag.resize(r.ratios.size());
        Amplitudes after(r.ratios.size());
        for (std::size_t j = 0; j < r.ratios.size(); j++) {
            branch.op.diag[j] = root * r.ratios[j];
            after[j] = branch.op.diag[j] * source[j] / root;
        }
        branch.prob = r.prob;
        branch.post_state = apply_permutation(r.correction, after);
        branch.correction = std::move(r.correction);
        step.branches.push_back(std::move(branch));
    }
    return step;
}

MeasurementStep build3(const SchmidtVector &source, const SchmidtVector &target, StepCase which) {
    const double a1 = source[0], b1 = source[1], c1 = source[2];
    const double a2 = target[0], b2 = target[1], c2 = target[2];
    const double A1 = a1 * a1, B1 = b1 * b1, C1 = c1 * c1;
    const double A2 = a2 * a2, B2 = b2 * b2, C2 = c2 * c2;

    std::vector<RawBranch> raw;
    if (which == StepCase::CaseI) {
        require_order({A2, A1, B1, B2, C2}, "a2 >= a1 >= b1 >= b2 >= c2");
        double p2 = guarded_ratio(B1 - B2, A2 - B2);
        double p3 = guarded_ratio(C1 - C2, A2 - C2);
        double p1 = A1 / A2 - (B2 / A2) * p2 - (C2 / A2) * p3;
        raw.push_back({clamp_probability(p1, "p1"), {a2 / a1, b2 / b1, c2 / c1}, identity_permutation(3)});
        raw.push_back({clamp_probability(p2, "p2"), {b2 / a1, a2 / b1, c2 / c1}, transposition(3, 0, 1)});
        raw.push_back({clamp_probability(p3, "p3"), {c2 / a1, b2 / b1, a2 / c1}, transposition(3, 0, 2)});
    } else {
        require_order({A2, B2, B1, C1, C2}, "a2 >= b2 >= b1 >= c1 >= c2");
        double p2 = guarded_ratio(A2 - A1, A2 - C2);
        double p3 = guarded_ratio(B2 - B1, B2 - C2);
        double p1 = A1 / A2 - (C2 / A2) * p2 - p3;
        raw.push_back({clamp_probability(p1, "p1"), {a2 / a1, b2 / b1, c2 / c1}, identity_permutation(3)});
        raw.push_back({clamp_probability(p2, "p2"), {c2 / a1, b2 / b1, a2 / c1}, transposition(3, 0, 2)});
        raw.push_back({clamp_probability(p3, "p3"), {a2 / a1, c2 / b1, b2 / c1}, transposition(3, 1, 2)});
    }
    return assemble(source, target, which, std::move(raw));
}

}  // namespace

MeasurementStep solve3(const SchmidtVector &source, const SchmidtVector &target) {
    check_pair(source, target, 3);
    if (same_state(source, target)) {
        return trivial_step(source);
    }
    check_source_positive(source);
    double B1 = source[1] * source[1];
    double B2 = target[1] * target[1];
    return build3(source, target, B1 >= B2 - kEpsCmp ? StepCase::CaseI : StepCase::CaseII);
}

MeasurementStep solve3_with_case(const SchmidtVector &source, const SchmidtVector &target, StepCase which) {
    if (which != StepCase::CaseI && which != StepCase::CaseII) {
        throw Error(ErrorCode::InvalidArgument, "solve3_with_case takes CASE_I or CASE_II");
    }
    check_pair(source, target, 3);
    check_source_positive(source);
    return build3(source, target, which);
}

MeasurementStep solve2(const SchmidtVector &source, const SchmidtVector &target) {
    check_pair(source, target, 2);
    if (same_state(source, target)) {
        return trivial_step(source);
    }
    check_source_positive(source);
    const double a1 = source[0], b1 = source[1];
    const double a2 = target[0], b2 = target[1];
    const double A1 = a1 * a1, A2 = a2 * a2, B2 = b2 * b2;
    // A2 == B2 forces the maximally entangled target, which only the identical
    // source majorizes; that was handled above.
    double den = A2 - B2;
    if (den < kEpsZero) {
        throw Error(ErrorCode::InternalInvariant, "maximally entangled target reached with a distinct source");
    }
    std::vector<RawBranch> raw;
    raw.push_back({clamp_probability((A1 - B2) / den, "p'1"), {a2 / a1, b2 / b1}, identity_permutation(2)});
    raw.push_back({clamp_probability((A2 - A1) / den, "p'2"), {b2 / a1, a2 / b1}, transposition(2, 0, 1)});
    return assemble(source, target, StepCase::TwoOutcome, std::move(raw));
}

}  // namespace dlt
