#include "dlt/transcript.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

namespace dlt {

using nlohmann::json;

ChainRecord ChainRecord::from_chain(const IntermediateChain &chain) {
    ChainRecord r;
    r.m = chain.m;
    r.steps = chain.steps;
    for (const auto &state : chain.basis_states) {
        std::vector<double> sq(state.size());
        for (std::size_t j = 0; j < state.size(); j++) {
            sq[j] = state[j] * state[j];
        }
        r.basis_squares.push_back(std::move(sq));
    }
    r.tilde_index = chain.tilde_index;
    r.blocks = chain.blocks;
    return r;
}

VerificationSummary VerificationSummary::from_report(const VerificationReport &report) {
    VerificationSummary s;
    s.passed = report.passed();
    s.paths_checked = report.paths_checked;
    for (const auto &c : report.summary()) {
        s.checks.push_back({c.name, c.step, c.max_deviation, c.tolerance, c.passed});
    }
    return s;
}

namespace {

// JSON has no infinities; a defective plan can produce them as deviations.
json num(double x) {
    if (std::isfinite(x)) {
        return x;
    }
    if (std::isnan(x)) {
        return "nan";
    }
    return x > 0 ? "inf" : "-inf";
}

double get_num(const json &j) {
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
        throw Error(ErrorCode::InvalidArgument, "expected a number, got '" + s + "'");
    }
    return j.get<double>();
}

json nums(const std::vector<double> &v) {
    json out = json::array();
    for (double x : v) {
        out.push_back(num(x));
    }
    return out;
}

std::vector<double> get_nums(const json &j) {
    std::vector<double> out;
    for (const auto &x : j) {
        out.push_back(get_num(x));
    }
    return out;
}

json range_json(const IndexRange &r) {
    return json{{"first", r.first}, {"size", r.size}};
}

IndexRange get_range(const json &j) {
    return IndexRange{j.at("first").get<std::size_t>(), j.at("size").get<std::size_t>()};
}

json chain_json(const ChainRecord &c) {
    json blocks = json::array();
    for (const auto &b : c.blocks) {
        blocks.push_back(range_json(b));
    }
    json states = json::array();
    for (const auto &s : c.basis_squares) {
        states.push_back(nums(s));
    }
    return json{
        {"m", c.m}, {"steps", c.steps}, {"basis_squares", states}, {"tilde_index", c.tilde_index}, {"blocks", blocks}};
}

ChainRecord get_chain(const json &j) {
    ChainRecord c;
    c.m = j.at("m").get<std::size_t>();
    c.steps = j.at("steps").get<std::size_t>();
    for (const auto &s : j.at("basis_squares")) {
        c.basis_squares.push_back(get_nums(s));
    }
    c.tilde_index = j.at("tilde_index").get<std::vector<std::size_t>>();
    for (const auto &b : j.at("blocks")) {
        c.blocks.push_back(get_range(b));
    }
    return c;
}

json step_json(const StepRecord &r) {
    json branches = json::array();
    for (const auto &b : r.step.branches) {
        branches.push_back(json{
            {"diag", nums(b.op.diag)},
            {"prob", num(b.prob)},
            {"correction", b.correction},
            {"post_state", nums(b.post_state)},
        });
    }
    return json{
        {"block", range_json(r.block)},
        {"case", std::string(step_case_name(r.step.case_tag))},
        {"pruned_count", r.step.pruned_count},
        {"source", nums(r.step.source)},
        {"target", nums(r.step.target)},
        {"branches", branches},
    };
}

StepRecord get_step(const json &j) {
    StepRecord r;
    r.block = get_range(j.at("block"));
    r.step.case_tag = step_case_from_name(j.at("case").get<std::string>());
    r.step.pruned_count = j.at("pruned_count").get<std::size_t>();
    r.step.source = get_nums(j.at("source"));
    r.step.target = get_nums(j.at("target"));
    for (const auto &b : j.at("branches")) {
        OutcomeBranch ob;
        ob.op.diag = get_nums(b.at("diag"));
        ob.prob = get_num(b.at("prob"));
        ob.correction = b.at("correction").get<Permutation>();
        ob.post_state = get_nums(b.at("post_state"));
        r.step.branches.push_back(std::move(ob));
    }
    return r;
}

json majorization_json(const MajorizationReport &m) {
    return json{
        {"holds", m.holds},
        {"failing_k", m.failing_k ? json(*m.failing_k) : json(nullptr)},
        {"tail_margins", nums(m.tail_margins)},
    };
}

MajorizationReport get_majorization(const json &j) {
    MajorizationReport m;
    m.holds = j.at("holds").get<bool>();
    if (!j.at("failing_k").is_null()) {
        m.failing_k = j.at("failing_k").get<std::size_t>();
    }
    m.tail_margins = get_nums(j.at("tail_margins"));
    return m;
}

json verification_json(const VerificationSummary &v) {
    json checks = json::array();
    for (const auto &c : v.checks) {
        checks.push_back(json{
            {"name", c.name},
            {"step", c.step},
            {"max_deviation", num(c.max_deviation)},
            {"tolerance", num(c.tolerance)},
            {"passed", c.passed},
        });
    }
    return json{{"passed", v.passed}, {"paths_checked", v.paths_checked}, {"checks", checks}};
}

VerificationSummary get_verification(const json &j) {
    VerificationSummary v;
    v.passed = j.at("passed").get<bool>();
    v.paths_checked = j.at("paths_checked").get<std::size_t>();
    for (const auto &c : j.at("checks")) {
        v.checks.push_back({c.at("name").get<std::string>(), c.at("step").get<int>(), get_num(c.at("max_deviation")),
                            get_num(c.at("tolerance")), c.at("passed").get<bool>()});
    }
    return v;
}

json frequencies_json(const FrequencyReport &f) {
    json analytic = json::array();
    for (const auto &row : f.analytic) {
        analytic.push_back(nums(row));
    }
    return json{
        {"shots", f.shots},
        {"seed", f.seed},
        {"branch_counts", f.branch_counts},
        {"analytic", analytic},
        {"path_counts", f.path_counts},
        {"matched", f.matched},
        {"match_rate", num(f.match_rate())},
        {"max_final_deviation", num(f.max_final_deviation)},
    };
}

FrequencyReport get_frequencies(const json &j) {
    FrequencyReport f;
    f.shots = j.at("shots").get<std::uint64_t>();
    f.seed = j.at("seed").get<std::uint64_t>();
    f.branch_counts = j.at("branch_counts").get<std::vector<std::vector<std::uint64_t>>>();
    for (const auto &row : j.at("analytic")) {
        f.analytic.push_back(get_nums(row));
    }
    f.path_counts = j.at("path_counts").get<std::map<std::string, std::uint64_t>>();
    f.matched = j.at("matched").get<std::uint64_t>();
    f.max_final_deviation = get_num(j.at("max_final_deviation"));
    return f;
}

json greatest_first_json(const GreatestFirstRecord &g) {
    json out{{"m", g.m}, {"collapsed", g.collapsed}};
    if (g.certificate) {
        const auto &c = *g.certificate;
        out["certificate"] = json{
            {"k", c.k},
            {"index", c.index},
            {"tilde_squared", num(c.tilde_squared)},
            {"intermediate_rank", c.intermediate_rank},
            {"target_rank", c.target_rank},
            {"intermediate_squares", nums(c.intermediate_squares)},
        };
    }
    if (g.chain) {
        out["chain"] = chain_json(*g.chain);
    }
    return out;
}

GreatestFirstRecord get_greatest_first(const json &j) {
    GreatestFirstRecord g;
    g.m = j.at("m").get<std::size_t>();
    g.collapsed = j.at("collapsed").get<bool>();
    if (j.contains("certificate")) {
        const auto &c = j.at("certificate");
        g.certificate = CertificateRecord{
            c.at("k").get<std::size_t>(),
            c.at("index").get<std::size_t>(),
            get_num(c.at("tilde_squared")),
            c.at("intermediate_rank").get<std::size_t>(),
            c.at("target_rank").get<std::size_t>(),
            get_nums(c.at("intermediate_squares")),
        };
    }
    if (j.contains("chain")) {
        g.chain = get_chain(j.at("chain"));
    }
    return g;
}

}  // namespace

std::string serialize(const Transcript &t) {
    json out;
    out["tool_version"] = t.tool_version;
    out["command"] = t.command;
    out["problem"] = json{
        {"source", nums(t.problem.source)},
        {"target", nums(t.problem.target)},
        {"squared", t.problem.squared},
        {"autosort", t.problem.autosort},
    };
    if (t.majorization) {
        out["majorization"] = majorization_json(*t.majorization);
    }
    if (t.chain) {
        out["chain"] = chain_json(*t.chain);
    }
    json steps = json::array();
    for (const auto &s : t.steps) {
        steps.push_back(step_json(s));
    }
    out["steps"] = steps;
    if (t.verification) {
        out["verification"] = verification_json(*t.verification);
    }
    if (t.seed) {
        out["seed"] = *t.seed;
    }
    if (t.frequencies) {
        out["frequencies"] = frequencies_json(*t.frequencies);
    }
    if (t.greatest_first) {
        out["greatest_first"] = greatest_first_json(*t.greatest_first);
    }
    if (t.error) {
        out["error"] = json{{"code", t.error->code}, {"message", t.error->message}};
    }
    return out.dump(2) + "\n";
}

Transcript parse_transcript(std::string_view text) {
    try {
        json in = json::parse(text);
        Transcript t;
        t.tool_version = in.at("tool_version").get<std::string>();
        t.command = in.at("command").get<std::string>();
        const auto &p = in.at("problem");
        t.problem.source = get_nums(p.at("source"));
        t.problem.target = get_nums(p.at("target"));
        t.problem.squared = p.at("squared").get<bool>();
        t.problem.autosort = p.at("autosort").get<bool>();
        if (in.contains("majorization")) {
            t.majorization = get_majorization(in.at("majorization"));
        }
        if (in.contains("chain")) {
            t.chain = get_chain(in.at("chain"));
        }
        for (const auto &s : in.at("steps")) {
            t.steps.push_back(get_step(s));
        }
        if (in.contains("verification")) {
            t.verification = get_verification(in.at("verification"));
        }
        if (in.contains("seed")) {
            t.seed = in.at("seed").get<std::uint64_t>();
        }
        if (in.contains("frequencies")) {
            t.frequencies = get_frequencies(in.at("frequencies"));
        }
        if (in.contains("greatest_first")) {
            t.greatest_first = get_greatest_first(in.at("greatest_first"));
        }
        if (in.contains("error")) {
            t.error = ErrorRecord{in.at("error").at("code").get<std::string>(),
                                  in.at("error").at("message").get<std::string>()};
        }
        return t;
    } catch (const json::exception &e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed transcript: ") + e.what());
    }
}

ProblemSpec parse_problem(std::string_view text) {
    try {
        json in = json::parse(text);
        if (!in.is_object()) {
            throw Error(ErrorCode::InvalidArgument, "problem must be a JSON object");
        }
        ProblemSpec p;
        p.source = in.at("source").get<std::vector<double>>();
        p.target = in.at("target").get<std::vector<double>>();
        p.squared = in.value("squared", false);
        p.autosort = in.value("autosort", false);
        return p;
    } catch (const json::exception &e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed problem: ") + e.what());
    }
}

}  // namespace dlt
