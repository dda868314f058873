#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dlt/ladder.hpp"
#include "dlt/oracle.hpp"

namespace dlt {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Raw problem as supplied on the command line / stdin.
struct ProblemSpec {
    std::vector<double> source;
    std::vector<double> target;
    bool squared = false;
    bool autosort = false;

    bool operator==(const ProblemSpec &) const = default;
};

struct ChainRecord {
    std::size_t m = 0;
    std::size_t steps = 0;
    /// Squared coefficients of every state at their basis positions.
    std::vector<std::vector<double>> basis_squares;
    std::vector<std::size_t> tilde_index;
    std::vector<IndexRange> blocks;

    static ChainRecord from_chain(const IntermediateChain &chain);
    bool operator==(const ChainRecord &) const = default;
};

struct StepRecord {
    IndexRange block;
    MeasurementStep step;

    bool operator==(const StepRecord &) const = default;
};

struct CheckRecord {
    std::string name;
    int step = -1;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;

    bool operator==(const CheckRecord &) const = default;
};

struct VerificationSummary {
    bool passed = false;
    std::size_t paths_checked = 0;
    /// Worst case per check name.
    std::vector<CheckRecord> checks;

    static VerificationSummary from_report(const VerificationReport &report);
    bool operator==(const VerificationSummary &) const = default;
};

struct CertificateRecord {
    std::size_t k = 0;
    std::size_t index = 0;
    double tilde_squared = 0.0;
    std::size_t intermediate_rank = 0;
    std::size_t target_rank = 0;
    std::vector<double> intermediate_squares;

    bool operator==(const CertificateRecord &) const = default;
};

struct GreatestFirstRecord {
    std::size_t m = 0;
    bool collapsed = false;
    std::optional<CertificateRecord> certificate;
    std::optional<ChainRecord> chain;

    bool operator==(const GreatestFirstRecord &) const = default;
};

struct ErrorRecord {
    std::string code;
    std::string message;

    bool operator==(const ErrorRecord &) const = default;
};

/// Everything one CLI invocation reports. Optional parts are present only for
/// the commands that produce them.
struct Transcript {
    std::string tool_version{kToolVersion};
    std::string command;
    ProblemSpec problem;
    std::optional<MajorizationReport> majorization;
    std::optional<ChainRecord> chain;
    std::vector<StepRecord> steps;
    std::optional<VerificationSummary> verification;
    std::optional<std::uint64_t> seed;
    std::optional<FrequencyReport> frequencies;
    std::optional<GreatestFirstRecord> greatest_first;
    std::optional<ErrorRecord> error;

    bool operator==(const Transcript &) const = default;
};

/// JSON text with shortest round-trip floats, two-space indent, trailing newline.
std::string serialize(const Transcript &t);
/// Inverse of serialize(); throws dlt::Error(InvalidArgument) on malformed input.
Transcript parse_transcript(std::string_view text);

/// Reads {"source": [...], "target": [...], "squared": bool, "autosort": bool}.
ProblemSpec parse_problem(std::string_view text);

}  // namespace dlt
