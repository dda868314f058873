#include "dlt/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"

namespace dlt {

namespace {

struct ParsedProblem {
    SchmidtVector source;
    SchmidtVector target;
};

ParsedProblem parse_states(const ProblemSpec &spec) {
    SchmidtVector source = validate(spec.source, spec.squared, spec.autosort);
    SchmidtVector target = validate(spec.target, spec.squared, spec.autosort);
    if (source.n() != target.n()) {
        throw Error(ErrorCode::DimensionMismatch, "source has " + std::to_string(source.n()) +
                                                      " coefficients, target has " + std::to_string(target.n()));
    }
    if (source.n() > kMaxOracleDimension) {
        throw Error(ErrorCode::InvalidArgument, "dimension " + std::to_string(source.n()) +
                                                    " exceeds the oracle limit of " +
                                                    std::to_string(kMaxOracleDimension));
    }
    return {std::move(source), std::move(target)};
}

CommandResult fail(CommandResult r, int code, const Error &e) {
    r.exit_code = code;
    r.message = e.what();
    r.transcript.error = ErrorRecord{std::string(error_code_name(e.code())), e.detail()};
    return r;
}

CommandResult start(const char *command, const ProblemSpec &spec) {
    CommandResult r;
    r.transcript.command = command;
    r.transcript.problem = spec;
    return r;
}

std::vector<StepRecord> step_records(const LadderPlan &plan) {
    std::vector<StepRecord> out;
    for (std::size_t k = 0; k < plan.steps.size(); k++) {
        out.push_back({plan.chain.blocks.at(k), plan.steps[k]});
    }
    return out;
}

/// Shared by plan and simulate. On success `plan` is filled and the exit code is 0
/// or 3 depending on verification.
CommandResult plan_into(CommandResult r, const ParsedProblem &p, std::size_t m, std::optional<LadderPlan> &plan) {
    auto report = majorizes(p.source, p.target);
    r.transcript.majorization = report;
    if (!report.holds) {
        r.exit_code = kExitNotMajorized;
        r.message = "source is not majorized by target (k = " + std::to_string(*report.failing_k) + ")";
        r.transcript.error = ErrorRecord{"NotMajorized", r.message};
        return r;
    }
    try {
        plan = plan_full(p.source, p.target, m);
    } catch (const Error &e) {
        if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::BlockTooLarge) {
            return fail(std::move(r), kExitInputError, e);
        }
        try {
            r.transcript.chain = ChainRecord::from_chain(build_chain(p.source, p.target, m));
        } catch (const Error &) {
        }
        return fail(std::move(r), kExitPlanFailure, e);
    }
    r.transcript.chain = ChainRecord::from_chain(plan->chain);
    r.transcript.steps = step_records(*plan);
    auto verification = verify_plan(*plan);
    r.transcript.verification = VerificationSummary::from_report(verification);
    if (!verification.passed()) {
        r.exit_code = kExitPlanFailure;
        r.message = "plan failed independent verification";
    }
    return r;
}

}  // namespace

CommandResult cmd_check(const ProblemSpec &spec) {
    CommandResult r = start("check", spec);
    try {
        auto p = parse_states(spec);
        auto report = majorizes(p.source, p.target);
        r.transcript.majorization = report;
        if (!report.holds) {
            r.exit_code = kExitNotMajorized;
            r.message = "source is not majorized by target (k = " + std::to_string(*report.failing_k) + ")";
        }
    } catch (const Error &e) {
        return fail(std::move(r), kExitInputError, e);
    }
    return r;
}

CommandResult cmd_plan(const ProblemSpec &spec, std::size_t m) {
    CommandResult r = start("plan", spec);
    std::optional<ParsedProblem> p;
    try {
        p = parse_states(spec);
    } catch (const Error &e) {
        return fail(std::move(r), kExitInputError, e);
    }
    std::optional<LadderPlan> plan;
    return plan_into(std::move(r), *p, m, plan);
}

CommandResult cmd_simulate(const ProblemSpec &spec, std::uint64_t shots, std::uint64_t seed, unsigned threads,
                           std::size_t m) {
    CommandResult r = start("simulate", spec);
    r.transcript.seed = seed;
    if (shots == 0) {
        return fail(std::move(r), kExitInputError, Error(ErrorCode::InvalidArgument, "shots must be positive"));
    }
    std::optional<ParsedProblem> p;
    try {
        p = parse_states(spec);
    } catch (const Error &e) {
        return fail(std::move(r), kExitInputError, e);
    }
    std::optional<LadderPlan> plan;
    r = plan_into(std::move(r), *p, m, plan);
    if (!plan) {
        return r;
    }
    auto freq = sample_trajectories(*plan, shots, seed, threads);
    r.transcript.frequencies = freq;
    if (r.exit_code == kExitOk && freq.matched != freq.shots) {
        r.exit_code = kExitPlanFailure;
        r.message = std::to_string(freq.shots - freq.matched) + " trajectories missed the target";
    }
    return r;
}

CommandResult cmd_demo_infeasible(const ProblemSpec &spec, std::size_t m) {
    CommandResult r = start("demo-infeasible", spec);
    try {
        auto p = parse_states(spec);
        auto report = majorizes(p.source, p.target);
        r.transcript.majorization = report;
        if (!report.holds) {
            r.exit_code = kExitNotMajorized;
            r.message = "source is not majorized by target (k = " + std::to_string(*report.failing_k) + ")";
            r.transcript.error = ErrorRecord{"NotMajorized", r.message};
            return r;
        }
        auto result = greatest_first_chain(p.source, p.target, m);
        GreatestFirstRecord g;
        g.m = m;
        if (auto *cert = std::get_if<InfeasibilityCertificate>(&result)) {
            g.collapsed = true;
            std::vector<double> sq;
            for (double a : cert->intermediate) {
                sq.push_back(a * a);
            }
            g.certificate = CertificateRecord{cert->k,           cert->index,       cert->tilde_squared,
                                              cert->intermediate_rank, cert->target_rank, std::move(sq)};
        } else {
            g.chain = ChainRecord::from_chain(std::get<IntermediateChain>(result));
        }
        r.transcript.greatest_first = std::move(g);
    } catch (const Error &e) {
        return fail(std::move(r), kExitInputError, e);
    }
    return r;
}

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string list(const std::vector<double> &v) {
    std::string out = "(";
    for (std::size_t j = 0; j < v.size(); j++) {
        out += (j ? ", " : "") + fmt(v[j]);
    }
    return out + ")";
}

/// Cycle notation with 1-based indices, "id" for the identity.
std::string cycles(const Permutation &perm) {
    std::string out;
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t j = 0; j < perm.size(); j++) {
        if (seen[j] || perm[j] == j) {
            continue;
        }
        out += "(";
        std::size_t c = j;
        bool first = true;
        while (!seen[c]) {
            seen[c] = true;
            out += (first ? "" : " ") + std::to_string(c + 1);
            first = false;
            c = perm[c];
        }
        out += ")";
    }
    return out.empty() ? "id" : out;
}

}  // namespace

std::string render_human(const CommandResult &result) {
    const Transcript &t = result.transcript;
    std::ostringstream os;
    os << "dlt " << t.tool_version << " " << t.command << "\n";
    if (t.majorization) {
        const auto &m = *t.majorization;
        os << "majorization: " << (m.holds ? "holds" : "fails");
        if (m.failing_k) {
            os << " (failing_k = " << *m.failing_k << ")";
        }
        os << "\n  tail margins " << list(m.tail_margins) << "\n";
    }
    if (t.chain) {
        os << "chain (squared coefficients, m = " << t.chain->m << ", " << t.chain->steps << " steps):\n";
        for (std::size_t k = 0; k < t.chain->basis_squares.size(); k++) {
            os << "  state " << k << ": " << list(t.chain->basis_squares[k]) << "\n";
        }
    }
    for (std::size_t k = 0; k < t.steps.size(); k++) {
        const auto &s = t.steps[k];
        os << "step " << k + 1 << " [" << step_case_name(s.step.case_tag) << "] on indices " << s.block.first + 1
           << ".." << s.block.end() << ", " << s.step.branches.size() << " outcomes";
        if (s.step.pruned_count) {
            os << " (" << s.step.pruned_count << " pruned)";
        }
        os << "\n";
        for (std::size_t i = 0; i < s.step.branches.size(); i++) {
            const auto &b = s.step.branches[i];
            os << "  M" << i + 1 << " = diag" << list(b.op.diag) << "  p = " << fmt(b.prob)
               << "  then " << cycles(b.correction) << "\n";
        }
    }
    if (t.verification) {
        const auto &v = *t.verification;
        os << "verification: " << (v.passed ? "passed" : "FAILED") << " (" << v.paths_checked << " paths)\n";
        for (const auto &c : v.checks) {
            os << "  " << (c.passed ? "ok  " : "FAIL") << " " << c.name << "  max dev " << fmt(c.max_deviation)
               << " (tol " << fmt(c.tolerance) << ")\n";
        }
    }
    if (t.frequencies) {
        const auto &f = *t.frequencies;
        os << "simulation: " << f.shots << " shots, seed " << f.seed << ", " << f.matched
           << " reached the target (max deviation " << fmt(f.max_final_deviation) << ")\n";
        for (std::size_t k = 0; k < f.branch_counts.size(); k++) {
            os << "  step " << k + 1 << ":";
            for (std::size_t i = 0; i < f.branch_counts[k].size(); i++) {
                double freq = static_cast<double>(f.branch_counts[k][i]) / static_cast<double>(f.shots);
                os << "  " << fmt(freq) << " vs " << fmt(f.analytic[k][i]);
            }
            os << "\n";
        }
    }
    if (t.greatest_first) {
        const auto &g = *t.greatest_first;
        if (g.certificate) {
            const auto &c = *g.certificate;
            os << "greatest-first (m = " << g.m << "): rank collapse at k = " << c.k << ", index " << c.index + 1
               << "\n  tilde^2 = " << fmt(c.tilde_squared) << ", intermediate rank " << c.intermediate_rank
               << " < target rank " << c.target_rank << "\n  intermediate " << list(c.intermediate_squares) << "\n";
        } else if (g.chain) {
            os << "greatest-first (m = " << g.m << "): no collapse, " << g.chain->steps << " steps\n";
            for (std::size_t k = 0; k < g.chain->basis_squares.size(); k++) {
                os << "  state " << k << ": " << list(g.chain->basis_squares[k]) << "\n";
            }
        }
    }
    if (t.seed && !t.frequencies) {
        os << "seed: " << *t.seed << "\n";
    }
    return os.str();
}

std::string render_machine(const CommandResult &result) {
    return serialize(result.transcript);
}

int run_cli(int argc, const char *const *argv, std::istream &in, std::ostream &out, std::ostream &err) {
    CLI::App app{"Deterministic LOCC transformation planner"};
    app.require_subcommand(1);

    struct Options {
        std::string input;
        bool squared = false;
        bool autosort = false;
        std::uint64_t shots = 10000;
        std::optional<std::uint64_t> seed;
        std::string format = "human";
        unsigned threads = 0;
        std::size_t m = 3;
    } opt;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--input", opt.input, "Read the problem from a file instead of stdin");
        sub->add_flag("--squared", opt.squared, "Coefficients are given squared");
        sub->add_flag("--autosort", opt.autosort, "Sort coefficients instead of rejecting unsorted input");
        sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"human", "machine"}));
    };

    auto *check = app.add_subcommand("check", "Test whether the source can reach the target");
    auto *plan = app.add_subcommand("plan", "Build and verify a measurement protocol");
    auto *simulate = app.add_subcommand("simulate", "Plan, then sample measurement trajectories");
    auto *demo = app.add_subcommand("demo-infeasible", "Run the greatest-first ordering and report rank collapse");
    for (auto *sub : {check, plan, simulate, demo}) {
        add_common(sub);
    }
    for (auto *sub : {plan, simulate, demo}) {
        sub->add_option("-m,--block", opt.m, "Block size")->check(CLI::Range(2, 64));
    }
    simulate->add_option("--shots", opt.shots, "Number of trajectories");
    simulate->add_option("--seed", opt.seed, "Master seed (default: $DLT_SEED, else 0)");
    simulate->add_option("--threads", opt.threads, "Worker threads (0 = hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    std::uint64_t seed = 0;
    if (opt.seed) {
        seed = *opt.seed;
    } else if (const char *env = std::getenv("DLT_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            std::string s(env);
            seed = std::stoull(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument(s);
            }
        } catch (const std::exception &) {
            err << "error: DLT_SEED is not an unsigned integer: " << env << "\n";
            return kExitInputError;
        }
    }

    std::string text;
    if (!opt.input.empty()) {
        std::ifstream file(opt.input);
        if (!file) {
            err << "error: cannot open " << opt.input << "\n";
            return kExitInputError;
        }
        text.assign(std::istreambuf_iterator<char>(file), {});
    } else {
        text.assign(std::istreambuf_iterator<char>(in), {});
    }

    ProblemSpec spec;
    try {
        spec = parse_problem(text);
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    spec.squared = spec.squared || opt.squared;
    spec.autosort = spec.autosort || opt.autosort;

    CommandResult result;
    if (check->parsed()) {
        result = cmd_check(spec);
    } else if (plan->parsed()) {
        result = cmd_plan(spec, opt.m);
    } else if (simulate->parsed()) {
        result = cmd_simulate(spec, opt.shots, seed, opt.threads, opt.m);
    } else {
        result = cmd_demo_infeasible(spec, opt.m);
    }

    if (opt.format == "machine") {
        out << render_machine(result);
    } else {
        out << render_human(result);
    }
    if (result.exit_code != kExitOk && !result.message.empty()) {
        err << "error: " << result.message << "\n";
    }
    return result.exit_code;
}

}  // namespace dlt
