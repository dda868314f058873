#include "dlt/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dlt {

namespace {

std::vector<double> squares_of(std::span<const double> amps) {
    std::vector<double> sq(amps.size());
    for (std::size_t j = 0; j < amps.size(); j++) {
        sq[j] = amps[j] * amps[j];
    }
    return sq;
}

bool same_squares(const SchmidtVector &a, const SchmidtVector &b) {
    for (std::size_t j = 0; j < a.n(); j++) {
        if (std::abs(a[j] * a[j] - b[j] * b[j]) > kEpsCmp) {
            return false;
        }
    }
    return true;
}

void require_pair(const SchmidtVector &source, const SchmidtVector &target) {
    if (source.n() != target.n()) {
        throw Error(
            ErrorCode::DimensionMismatch,
            "source has " + std::to_string(source.n()) + " coefficients, target has " + std::to_string(target.n()));
    }
    auto report = majorizes(source, target);
    if (!report.holds) {
        throw Error(ErrorCode::NotMajorized, "tail inequality fails at k=" + std::to_string(*report.failing_k));
    }
}

IntermediateChain trivial_chain(const SchmidtVector &source, const SchmidtVector &target, std::size_t m) {
    IntermediateChain chain;
    chain.m = m;
    chain.steps = 1;
    chain.basis_states = {source.amps(), target.amps()};
    chain.states = {source, target};
    chain.blocks = {IndexRange{0, source.n()}};
    return chain;
}

void fill_sorted_views(IntermediateChain &chain) {
    chain.states.clear();
    for (const auto &s : chain.basis_states) {
        chain.states.push_back(SchmidtVector::sorted_from(s));
    }
}

MeasurementStep trivial_full_step(const Amplitudes &state) {
    MeasurementStep step;
    step.source = state;
    step.target = state;
    step.case_tag = StepCase::Trivial;
    step.branches.push_back({DiagonalKraus::identity(state.size()), 1.0, identity_permutation(state.size()), state});
    return step;
}

}  // namespace

BlockDecomposition block_decompose_range(std::span<const double> amps, IndexRange range) {
    if (range.size < 2) {
        throw Error(ErrorCode::InvalidArgument, "block needs at least 2 coefficients");
    }
    if (range.end() > amps.size()) {
        throw Error(
            ErrorCode::IndexRangeInvalid, "block [" + std::to_string(range.first) + ", " + std::to_string(range.end()) +
                                              ") exceeds dimension " + std::to_string(amps.size()));
    }
    double norm_sq = 0.0;
    for (std::size_t j = range.first; j < range.end(); j++) {
        norm_sq += amps[j] * amps[j];
    }
    double norm = std::sqrt(norm_sq);
    if (norm <= kEpsZero) {
        throw Error(ErrorCode::ZeroBlockNorm, "active block holds only zero coefficients");
    }

    std::vector<std::size_t> order(range.size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return amps[range.first + x] > amps[range.first + y];
    });
    std::vector<double> block(range.size);
    for (std::size_t a = 0; a < range.size; a++) {
        block[a] = amps[range.first + order[a]] / norm;
    }

    return BlockDecomposition{
        Amplitudes(amps.begin(), amps.begin() + static_cast<std::ptrdiff_t>(range.first)),
        Amplitudes(amps.begin() + static_cast<std::ptrdiff_t>(range.end()), amps.end()),
        norm,
        SchmidtVector(std::move(block)),
        range,
        std::move(order),
    };
}

BlockDecomposition block_decompose(const SchmidtVector &state, std::size_t m) {
    if (m < 2) {
        throw Error(ErrorCode::InvalidArgument, "block size must be at least 2");
    }
    if (m > state.n()) {
        throw Error(
            ErrorCode::BlockTooLarge,
            "block size " + std::to_string(m) + " exceeds dimension " + std::to_string(state.n()));
    }
    return block_decompose_range(state.amps(), IndexRange{state.n() - m, m});
}

SchmidtVector choose_omega(const SchmidtVector &block_source, std::span<const double> target_tail, double block_norm) {
    std::size_t m = block_source.n();
    if (target_tail.size() + 1 != m) {
        throw Error(
            ErrorCode::DimensionMismatch,
            "block of size " + std::to_string(m) + " needs " + std::to_string(m - 1) + " target coefficients");
    }
    if (!(block_norm > kEpsZero)) {
        throw Error(ErrorCode::ZeroBlockNorm, "block norm must be positive");
    }
    std::vector<double> omega(m);
    double fixed_sq = 0.0;
    for (std::size_t j = 1; j < m; j++) {
        omega[j] = target_tail[j - 1] / block_norm;
        fixed_sq += omega[j] * omega[j];
    }
    double head_sq = 1.0 - fixed_sq;
    if (head_sq < -kEpsCmp) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "fixed target coefficients already carry " << fixed_sq << " of the block norm";
        throw Error(ErrorCode::NormalizationUnderflow, msg.str());
    }
    omega[0] = std::sqrt(std::max(head_sq, 0.0));
    if (omega[0] < omega[1]) {
        if (omega[0] * omega[0] < omega[1] * omega[1] - kEpsCmp) {
            throw Error(ErrorCode::OmegaNotSorted, "closing coefficient is smaller than the next target coefficient");
        }
        omega[0] = omega[1];
    }
    for (std::size_t j = 1; j + 1 < m; j++) {
        if (omega[j] < omega[j + 1]) {
            throw Error(ErrorCode::OmegaNotSorted, "target coefficients are not non-increasing");
        }
    }
    SchmidtVector result(std::move(omega));
    auto report = majorizes(block_source, result);
    if (!report.holds) {
        throw Error(
            ErrorCode::OmegaNotMajorizing,
            "block cannot reach the chosen target (tail inequality fails at k=" + std::to_string(*report.failing_k) +
                ")");
    }
    return result;
}

std::size_t ladder_length(std::size_t n, std::size_t m) {
    if (m < 2) {
        throw Error(ErrorCode::InvalidArgument, "block size must be at least 2");
    }
    if (n <= m) {
        return 1;
    }
    return 1 + (n - m + m - 2) / (m - 1);
}

IntermediateChain build_chain(const SchmidtVector &source, const SchmidtVector &target, std::size_t m) {
    require_pair(source, target);
    if (m < 2) {
        throw Error(ErrorCode::InvalidArgument, "block size must be at least 2");
    }
    if (same_squares(source, target)) {
        return trivial_chain(source, target, m);
    }
    const std::size_t n = source.n();
    const std::size_t l = ladder_length(n, m);

    IntermediateChain chain;
    chain.m = m;
    chain.steps = l;
    chain.basis_states.push_back(source.amps());
    for (std::size_t k = 1; k < l; k++) {
        std::size_t p = n - k * (m - 1) - 1;
        double tilde_sq = source[p] * source[p];
        for (std::size_t j = p + 1; j < n; j++) {
            tilde_sq += source[j] * source[j] - target[j] * target[j];
        }
        double tilde = std::sqrt(std::max(tilde_sq, 0.0));

        Amplitudes state(n);
        for (std::size_t j = 0; j < p; j++) {
            state[j] = source[j];
        }
        state[p] = tilde;
        for (std::size_t j = p + 1; j < n; j++) {
            state[j] = target[j];
        }
        chain.basis_states.push_back(std::move(state));
        chain.tilde_values.push_back(tilde);
        chain.tilde_index.push_back(p);
        chain.blocks.push_back(IndexRange{p, m});
    }
    chain.basis_states.push_back(target.amps());
    chain.blocks.push_back(IndexRange{0, n - (l - 1) * (m - 1)});
    fill_sorted_views(chain);
    return chain;
}

bool ChainCheck::ok() const noexcept {
    return std::all_of(links.begin(), links.end(), [](const LinkCheck &c) { return c.ok(); });
}

std::string ChainCheck::describe_failure() const {
    for (const auto &c : links) {
        if (c.ok()) {
            continue;
        }
        std::vector<std::string> reasons;
        if (!c.state_majorized) {
            reasons.push_back("intermediate states not majorization-ordered");
        }
        if (!c.block_majorized) {
            reasons.push_back("active block cannot reach its target");
        }
        if (!c.positional_ok) {
            std::ostringstream margin;
            margin << "positional tail margin " << c.positional_margin;
            reasons.push_back(margin.str());
        }
        if (!c.confined_to_block) {
            reasons.push_back("coefficients changed outside the block");
        }
        if (!c.suffix_fixed) {
            reasons.push_back("fixed target coefficients differ");
        }
        std::ostringstream out;
        out << "link " << c.k << " -> " << c.k + 1 << ": ";
        for (std::size_t i = 0; i < reasons.size(); i++) {
            out << (i ? "; " : "") << reasons[i];
        }
        return out.str();
    }
    return "";
}

ChainCheck check_chain(const IntermediateChain &chain, const SchmidtVector &target) {
    ChainCheck result;
    const std::size_t n = target.n();
    for (std::size_t k = 0; k < chain.steps; k++) {
        const Amplitudes &cur = chain.basis_states[k];
        const Amplitudes &next = chain.basis_states[k + 1];
        const IndexRange range = chain.blocks[k];
        LinkCheck c;
        c.k = k;
        c.state_majorized = majorizes_squares(squares_of(cur), squares_of(next)).holds;

        std::span<const double> cur_block(cur.data() + range.first, range.size);
        std::span<const double> next_block(next.data() + range.first, range.size);
        c.block_majorized = majorizes_squares(squares_of(cur_block), squares_of(next_block)).holds;

        double tail_cur = 0.0;
        double tail_next = 0.0;
        double worst = 0.0;
        for (std::size_t t = range.end(); t-- > range.first;) {
            tail_cur += cur[t] * cur[t];
            tail_next += next[t] * next[t];
            worst = std::min(worst, tail_cur - tail_next);
        }
        c.positional_margin = worst;
        c.positional_ok = worst >= -kEpsCmp && std::abs(tail_cur - tail_next) <= kEpsCmp;

        c.confined_to_block = true;
        for (std::size_t j = 0; j < n; j++) {
            if ((j < range.first || j >= range.end()) && cur[j] != next[j]) {
                c.confined_to_block = false;
            }
        }

        std::size_t fixed_from = 0;
        if (k + 1 < chain.steps) {
            fixed_from = n - (k + 1) * (chain.m - 1);
        }
        c.suffix_fixed = true;
        for (std::size_t j = fixed_from; j < n; j++) {
            if (next[j] != target[j]) {
                c.suffix_fixed = false;
            }
        }
        result.links.push_back(c);
    }
    return result;
}

IntermediateChain intermediate_chain(const SchmidtVector &source, const SchmidtVector &target, std::size_t m) {
    IntermediateChain chain = build_chain(source, target, m);
    ChainCheck check = check_chain(chain, target);
    if (!check.ok()) {
        throw Error(ErrorCode::ChainInvariantViolated, check.describe_failure());
    }
    return chain;
}

GreatestFirstResult greatest_first_chain(const SchmidtVector &source, const SchmidtVector &target, std::size_t m) {
    require_pair(source, target);
    if (m < 2) {
        throw Error(ErrorCode::InvalidArgument, "block size must be at least 2");
    }
    if (same_squares(source, target)) {
        return trivial_chain(source, target, m);
    }
    const std::size_t n = source.n();
    const std::size_t l = ladder_length(n, m);
    const std::size_t target_rank = effective_rank(target);

    IntermediateChain chain;
    chain.m = m;
    chain.steps = l;
    chain.basis_states.push_back(source.amps());
    for (std::size_t k = 1; k < l; k++) {
        std::size_t p = k * (m - 1);
        double tilde_sq = target[p] * target[p];
        for (std::size_t j = p + 1; j < n; j++) {
            tilde_sq += target[j] * target[j] - source[j] * source[j];
        }
        bool vanished = tilde_sq <= kEpsCmp;
        double tilde = vanished ? 0.0 : std::sqrt(tilde_sq);

        Amplitudes state(n);
        for (std::size_t j = 0; j < p; j++) {
            state[j] = target[j];
        }
        state[p] = tilde;
        for (std::size_t j = p + 1; j < n; j++) {
            state[j] = source[j];
        }
        std::size_t rank = effective_rank(state);
        if (vanished && rank < target_rank) {
            return InfeasibilityCertificate{k, p, tilde_sq, rank, target_rank, std::move(state)};
        }
        chain.basis_states.push_back(std::move(state));
        chain.tilde_values.push_back(tilde);
        chain.tilde_index.push_back(p);
        chain.blocks.push_back(IndexRange{(k - 1) * (m - 1), m});
    }
    chain.basis_states.push_back(target.amps());
    chain.blocks.push_back(IndexRange{(l - 1) * (m - 1), n - (l - 1) * (m - 1)});
    fill_sorted_views(chain);
    return chain;
}

MeasurementStep embed_step(const MeasurementStep &block_step, const BlockDecomposition &decomposition, std::size_t n) {
    const IndexRange range = decomposition.range;
    if (range.size != block_step.n() || range.end() > n || decomposition.prefix.size() != range.first ||
        decomposition.suffix.size() != n - range.end() || decomposition.order.size() != range.size) {
        throw Error(ErrorCode::IndexRangeInvalid, "block step does not fit the decomposition in dimension " +
                                                      std::to_string(n));
    }
    const double norm = decomposition.block_norm;

    Amplitudes source(n);
    Amplitudes target(n);
    for (std::size_t j = 0; j < range.first; j++) {
        source[j] = target[j] = decomposition.prefix[j];
    }
    for (std::size_t j = range.end(); j < n; j++) {
        source[j] = target[j] = decomposition.suffix[j - range.end()];
    }
    for (std::size_t a = 0; a < range.size; a++) {
        source[range.first + decomposition.order[a]] = norm * block_step.source[a];
        target[range.first + a] = norm * block_step.target[a];
    }

    MeasurementStep full;
    full.source = source;
    full.target = target;
    full.case_tag = block_step.case_tag;
    full.pruned_count = block_step.pruned_count;
    for (const auto &b : block_step.branches) {
        OutcomeBranch fb;
        fb.prob = b.prob;
        fb.op.diag.assign(n, std::sqrt(b.prob));
        fb.correction = identity_permutation(n);
        for (std::size_t a = 0; a < range.size; a++) {
            std::size_t at = range.first + decomposition.order[a];
            fb.op.diag[at] = b.op.diag[a];
            fb.correction[at] = range.first + b.correction[a];
        }
        Amplitudes after(n);
        double root = std::sqrt(b.prob);
        for (std::size_t j = 0; j < n; j++) {
            after[j] = fb.op.diag[j] * source[j] / root;
        }
        fb.post_state = apply_permutation(fb.correction, after);
        full.branches.push_back(std::move(fb));
    }
    return full;
}

LadderPlan plan_full(const SchmidtVector &source, const SchmidtVector &target, std::size_t m) {
    if (m != 2 && m != 3) {
        throw Error(ErrorCode::InvalidArgument, "plans are built from blocks of size 2 or 3");
    }
    require_pair(source, target);
    const std::size_t n = source.n();

    if (same_squares(source, target)) {
        LadderPlan plan{trivial_chain(source, target, m), {}, source, target};
        plan.steps.push_back(trivial_full_step(source.amps()));
        return plan;
    }

    LadderPlan plan{intermediate_chain(source, target, m), {}, source, target};
    for (std::size_t k = 0; k < plan.chain.steps; k++) {
        const Amplitudes &cur = plan.chain.basis_states[k];
        const Amplitudes &next = plan.chain.basis_states[k + 1];
        const IndexRange range = plan.chain.blocks[k];

        BlockDecomposition dec = block_decompose_range(cur, range);
        std::span<const double> fixed(next.data() + range.first + 1, range.size - 1);
        SchmidtVector omega = choose_omega(dec.block, fixed, dec.block_norm);

        // The closing coefficient is computed twice: from the running sums over
        // source and target, and by renormalizing the block. They must agree.
        double closing = omega[0] * dec.block_norm;
        if (std::abs(closing * closing - next[range.first] * next[range.first]) > kEpsCmp) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "link " << k << ": block closing coefficient " << closing << " disagrees with chain value "
                << next[range.first];
            throw Error(ErrorCode::ChainInvariantViolated, msg.str());
        }

        MeasurementStep block_step = range.size == 3 ? solve3(dec.block, omega) : solve2(dec.block, omega);
        MeasurementStep full = embed_step(block_step, dec, n);
        full.source = cur;
        full.target = next;
        plan.steps.push_back(std::move(full));
    }
    return plan;
}

}  // namespace dlt
