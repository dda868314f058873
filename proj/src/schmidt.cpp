#include "dlt/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace dlt {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotNormalized:
            return "NotNormalized";
        case ErrorCode::NotSorted:
            return "NotSorted";
        case ErrorCode::NegativeEntry:
            return "NegativeEntry";
        case ErrorCode::NonFinite:
            return "NonFinite";
        case ErrorCode::DimensionTooSmall:
            return "DimensionTooSmall";
        case ErrorCode::DimensionMismatch:
            return "DimensionMismatch";
        case ErrorCode::NotMajorized:
            return "NotMajorized";
        case ErrorCode::SourceHasZero:
            return "SourceHasZero";
        case ErrorCode::BlockTooLarge:
            return "BlockTooLarge";
        case ErrorCode::ZeroBlockNorm:
            return "ZeroBlockNorm";
        case ErrorCode::OmegaNotSorted:
            return "OmegaNotSorted";
        case ErrorCode::OmegaNotMajorizing:
            return "OmegaNotMajorizing";
        case ErrorCode::NormalizationUnderflow:
            return "NormalizationUnderflow";
        case ErrorCode::ChainInvariantViolated:
            return "ChainInvariantViolated";
        case ErrorCode::IndexRangeInvalid:
            return "IndexRangeInvalid";
        case ErrorCode::InvalidArgument:
            return "InvalidArgument";
        case ErrorCode::InternalInvariant:
            return "InternalInvariant";
    }
    return "Unknown";
}

namespace {

double sum_of_squares(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return s;
}

void check_entries(std::span<const double> v) {
    if (v.size() < 2) {
        throw Error(ErrorCode::DimensionTooSmall, "need at least 2 coefficients, got " + std::to_string(v.size()));
    }
    for (std::size_t j = 0; j < v.size(); j++) {
        if (!std::isfinite(v[j])) {
            throw Error(ErrorCode::NonFinite, "entry " + std::to_string(j + 1) + " is not finite");
        }
        if (v[j] < 0.0) {
            throw Error(ErrorCode::NegativeEntry, "entry " + std::to_string(j + 1) + " is negative");
        }
    }
}

void check_sorted(std::span<const double> v) {
    for (std::size_t j = 0; j + 1 < v.size(); j++) {
        if (v[j] < v[j + 1]) {
            throw Error(
                ErrorCode::NotSorted, "coefficients must be non-increasing (index " + std::to_string(j + 1) + ")");
        }
    }
}

void check_norm(double norm_sq) {
    if (std::abs(norm_sq - 1.0) > kEpsNorm) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "sum of squared coefficients is " << norm_sq;
        throw Error(ErrorCode::NotNormalized, msg.str());
    }
}

}  // namespace

SchmidtVector::SchmidtVector(std::vector<double> amps) : amps_(std::move(amps)) {
    check_entries(amps_);
    check_sorted(amps_);
    check_norm(sum_of_squares(amps_));
}

SchmidtVector SchmidtVector::sorted_from(std::span<const double> amps) {
    std::vector<double> v(amps.begin(), amps.end());
    std::stable_sort(v.begin(), v.end(), std::greater<>());
    return SchmidtVector(std::move(v));
}

std::vector<double> SchmidtVector::squares() const {
    std::vector<double> sq(amps_.size());
    for (std::size_t j = 0; j < amps_.size(); j++) {
        sq[j] = amps_[j] * amps_[j];
    }
    return sq;
}

bool SchmidtVector::source_grade() const noexcept {
    return std::all_of(amps_.begin(), amps_.end(), [](double a) { return a > kEpsZero; });
}

SchmidtVector validate(std::span<const double> raw, bool squared, bool autosort) {
    if (raw.empty()) {
        throw Error(ErrorCode::DimensionTooSmall, "empty coefficient list");
    }
    check_entries(raw);
    std::vector<double> amps(raw.begin(), raw.end());
    if (squared) {
        for (double &x : amps) {
            x = std::sqrt(x);
        }
    }
    if (autosort) {
        std::stable_sort(amps.begin(), amps.end(), std::greater<>());
    } else {
        check_sorted(amps);
    }
    double norm_sq = sum_of_squares(amps);
    check_norm(norm_sq);
    // Leave vectors that are already normalized to rounding untouched so that
    // re-validating serialized output is bit-exact.
    if (std::abs(norm_sq - 1.0) > 4.0 * static_cast<double>(amps.size()) * std::numeric_limits<double>::epsilon()) {
        double scale = 1.0 / std::sqrt(norm_sq);
        for (double &x : amps) {
            x *= scale;
        }
    }
    return SchmidtVector(std::move(amps));
}

MajorizationReport majorizes_squares(std::span<const double> source_sq, std::span<const double> target_sq) {
    if (source_sq.size() != target_sq.size()) {
        throw Error(
            ErrorCode::DimensionMismatch,
            "source has " + std::to_string(source_sq.size()) + " coefficients, target has " +
                std::to_string(target_sq.size()));
    }
    std::vector<double> s(source_sq.begin(), source_sq.end());
    std::vector<double> t(target_sq.begin(), target_sq.end());
    std::stable_sort(s.begin(), s.end(), std::greater<>());
    std::stable_sort(t.begin(), t.end(), std::greater<>());

    std::size_t n = s.size();
    MajorizationReport report;
    report.tail_margins.assign(n, 0.0);
    double tail_s = 0.0;
    double tail_t = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        tail_s += s[k];
        tail_t += t[k];
        report.tail_margins[k] = tail_s - tail_t;
    }
    for (std::size_t k = 0; k < n; k++) {
        double margin = report.tail_margins[k];
        bool ok = k == 0 ? std::abs(margin) <= kEpsCmp : margin >= -kEpsCmp;
        if (!ok) {
            report.failing_k = k + 1;
            break;
        }
    }
    report.holds = !report.failing_k.has_value();
    return report;
}

MajorizationReport majorizes(const SchmidtVector &source, const SchmidtVector &target) {
    return majorizes_squares(source.squares(), target.squares());
}

std::size_t effective_rank(std::span<const double> amps) {
    return static_cast<std::size_t>(std::count_if(amps.begin(), amps.end(), [](double a) { return a > kEpsZero; }));
}

std::size_t effective_rank(const SchmidtVector &v) {
    return effective_rank(v.amps());
}

}  // namespace dlt
