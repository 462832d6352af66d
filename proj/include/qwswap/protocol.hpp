#pragma once

// The three-step swap protocol end to end: decomposition of the two source
// pairs into orthogonal walker branches, the reference circuit, per-branch
// evolution traces, click statistics, the heralded state of the remote pair,
// Monte Carlo shot sampling with loss, and waveplate-jitter studies.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "qwswap/core.hpp"
#include "qwswap/statistics.hpp"
#include "qwswap/walk.hpp"

namespace qwswap {

// ---------------------------------------------------------------------------
// Source configuration

// Shared polarization amplitudes of the two source pairs a|HH> + b|VV>.
struct SwapConfig {
    double a = 1.0 / std::numbers::sqrt2;
    double b = 1.0 / std::numbers::sqrt2;

    static SwapConfig from_a(double a) {
        if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("amplitude a must lie in [0, 1]");
        return {a, std::sqrt(1.0 - a * a)};
    }

    void validate() const {
        if (!(a >= 0.0) || !(b >= 0.0))
            throw std::invalid_argument("amplitudes must be non-negative");
        if (std::abs(a * a + b * b - 1.0) > 1e-12)
            throw std::invalid_argument("amplitudes must satisfy a^2 + b^2 = 1");
    }

    // Purity of either photon's reduced state, a^4 + b^4. Shows up in most
    // branch coefficients.
    double pair_purity() const { return a * a * a * a + b * b * b * b; }
};

// ---------------------------------------------------------------------------
// Remote pair

// Pure polarization state of the two photons that never enter the walk, in
// the |HH>, |HV>, |VH>, |VV> product basis.
struct TwoQubitState {
    std::array<Amplitude, 4> amp{};

    static constexpr int index(Polarization first, Polarization second) {
        return 2 * static_cast<int>(first) + static_cast<int>(second);
    }

    Amplitude amplitude(Polarization first, Polarization second) const {
        return amp[index(first, second)];
    }

    double norm_squared() const {
        double n = 0.0;
        for (const Amplitude& c : amp) n += std::norm(c);
        return n;
    }
};

inline Amplitude inner_product(const TwoQubitState& x, const TwoQubitState& y) {
    Amplitude r{0.0, 0.0};
    for (int i = 0; i < 4; ++i) r += std::conj(x.amp[i]) * y.amp[i];
    return r;
}

inline double fidelity(const TwoQubitState& x, const TwoQubitState& y) {
    const double nx = x.norm_squared();
    const double ny = y.norm_squared();
    if (nx <= 0.0 || ny <= 0.0) throw std::invalid_argument("fidelity of a null state");
    return std::norm(inner_product(x, y)) / (nx * ny);
}

// Entanglement of a normalized pure two-qubit state,
// 2 |amp_HH amp_VV - amp_HV amp_VH|.
inline double concurrence(const TwoQubitState& s) {
    if (std::abs(s.norm_squared() - 1.0) > 1e-9)
        throw std::invalid_argument("concurrence requires a normalized state");
    return 2.0 * std::abs(s.amp[0] * s.amp[3] - s.amp[1] * s.amp[2]);
}

enum class BellState : std::uint8_t { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };

inline TwoQubitState bell_state(BellState b) {
    const double r = 1.0 / std::numbers::sqrt2;
    switch (b) {
        case BellState::PhiPlus: return {{r, 0.0, 0.0, r}};
        case BellState::PhiMinus: return {{r, 0.0, 0.0, -r}};
        case BellState::PsiPlus: return {{0.0, r, r, 0.0}};
        default: return {{0.0, r, -r, 0.0}};
    }
}

inline const char* to_string(BellState b) {
    switch (b) {
        case BellState::PhiPlus: return "phi_plus";
        case BellState::PhiMinus: return "phi_minus";
        case BellState::PsiPlus: return "psi_plus";
        default: return "psi_minus";
    }
}

// ---------------------------------------------------------------------------
// Branch decomposition

// The four orthogonal two-walker polarization states the input decomposes
// into. Parallel branches hold amplitude-weighted HH/VV superpositions,
// antiparallel branches the maximally entangled HV/VH ones.
enum class Branch : std::uint8_t {
    ParallelPlus = 0,
    ParallelMinus = 1,
    AntiparallelPlus = 2,
    AntiparallelMinus = 3,
};

inline constexpr std::array<Branch, 4> kAllBranches{
    Branch::ParallelPlus, Branch::ParallelMinus, Branch::AntiparallelPlus,
    Branch::AntiparallelMinus};

inline constexpr int branch_index(Branch b) { return static_cast<int>(b); }

inline const char* branch_label(Branch b) {
    switch (b) {
        case Branch::ParallelPlus: return "parallel_plus";
        case Branch::ParallelMinus: return "parallel_minus";
        case Branch::AntiparallelPlus: return "antiparallel_plus";
        default: return "antiparallel_minus";
    }
}

// Bell state of the remote pair riding along with each branch.
inline BellState remote_partner(Branch b) {
    switch (b) {
        case Branch::ParallelPlus: return BellState::PhiPlus;
        case Branch::ParallelMinus: return BellState::PhiMinus;
        case Branch::AntiparallelPlus: return BellState::PsiPlus;
        default: return BellState::PsiMinus;
    }
}

// Normalized two-walker state of a branch as the walk starts: slot 0 holds
// the photon beginning on line 2, slot 1 the photon on line 3, both at
// position 0.
inline OrderedState branch_walk_state(Branch branch, const SwapConfig& cfg) {
    cfg.validate();
    const Mode m2{Line::Line2, 0};
    const Mode m3{Line::Line3, 0};
    auto pair = [&](Polarization p2, Polarization p3) {
        return OrderedPairKet{PhotonBasisKet{p2, m2}, PhotonBasisKet{p3, m3}};
    };
    OrderedState s;
    switch (branch) {
        case Branch::ParallelPlus:
        case Branch::ParallelMinus: {
            const double rs = std::sqrt(cfg.pair_purity());
            const double sign = branch == Branch::ParallelPlus ? 1.0 : -1.0;
            s.add(pair(Polarization::H, Polarization::H), cfg.a * cfg.a / rs);
            s.add(pair(Polarization::V, Polarization::V), sign * cfg.b * cfg.b / rs);
            break;
        }
        default: {
            const double sign = branch == Branch::AntiparallelPlus ? 1.0 : -1.0;
            const double r = 1.0 / std::numbers::sqrt2;
            s.add(pair(Polarization::H, Polarization::V), r);
            s.add(pair(Polarization::V, Polarization::H), sign * r);
            break;
        }
    }
    return s.pruned();
}

struct BranchTerm {
    Branch branch = Branch::ParallelPlus;
    double coefficient = 0.0;  // real and non-negative
    TwoQubitState remote;
    OrderedState walk;

    double weight() const { return coefficient * coefficient; }
};

struct BranchDecomposition {
    SwapConfig config;
    std::array<BranchTerm, 4> terms;

    const BranchTerm& term(Branch b) const { return terms[branch_index(b)]; }

    std::array<double, 4> weights() const {
        std::array<double, 4> w{};
        for (int i = 0; i < 4; ++i) w[i] = terms[i].weight();
        return w;
    }
};

// Writes the four-photon input (source pairs a|HH>+b|VV> on photons 1&2 and
// 3&4; photons 2 and 3 walk, photons 1 and 4 stay put) as a sum of orthogonal
// branches, remote Bell state times normalized walker state, with real
// coefficients sqrt(purity/2), sqrt(purity/2), ab, ab. The weights sum to
// (a^2 + b^2)^2 = 1.
inline BranchDecomposition decompose_initial(const SwapConfig& cfg) {
    cfg.validate();
    const double c_parallel = std::sqrt(cfg.pair_purity() / 2.0);
    const double c_antiparallel = cfg.a * cfg.b;
    BranchDecomposition dec;
    dec.config = cfg;
    for (Branch b : kAllBranches) {
        const bool parallel = b == Branch::ParallelPlus || b == Branch::ParallelMinus;
        dec.terms[branch_index(b)] =
            BranchTerm{b, parallel ? c_parallel : c_antiparallel, bell_state(remote_partner(b)),
                       branch_walk_state(b, cfg)};
    }
    return dec;
}

// ---------------------------------------------------------------------------
// Reference circuit

// Step 1 leaves line 2 alone, flips line 3's polarization, walks, then routes
// the two lines' -1 ports into each other. Step 2 flips both lines and walks.
// Step 3 applies balanced waveplates to both lines and walks onto the
// detector plane.
inline Circuit build_protocol_circuit() {
    StepDescriptor s1;
    s1.coin_line2 = CoinOperator::identity();
    s1.coin_line3 = CoinOperator::not_gate();
    s1.exchange = ExchangeRule{-1};
    StepDescriptor s2;
    s2.coin_line2 = CoinOperator::not_gate();
    s2.coin_line3 = CoinOperator::not_gate();
    StepDescriptor s3;
    s3.coin_line2 = CoinOperator::hadamard();
    s3.coin_line3 = CoinOperator::hadamard();
    Circuit c;
    c.steps = {s1, s2, s3};
    return c;
}

// ---------------------------------------------------------------------------
// Evolution traces

struct BranchTrace {
    OrderedState initial;
    std::vector<OrderedState> labeled;  // state after steps 1 .. n-1
    FinalState final_state;             // after the last step, regime applied
    Regime regime = Regime::Synchronized;
};

inline BranchTrace run_branch(const OrderedState& initial, const Circuit& circuit, Regime regime) {
    if (circuit.steps.empty()) throw std::invalid_argument("circuit has no steps");
    const int bound = circuit.lattice_bound();
    BranchTrace trace;
    trace.initial = initial;
    trace.regime = regime;
    OrderedState state = initial;
    for (std::size_t i = 0; i + 1 < circuit.steps.size(); ++i) {
        state = run_step(state, circuit.steps[i], bound);
        trace.labeled.push_back(state);
    }
    trace.final_state = evolve_regime(state, circuit.steps.back(), regime, bound);
    return trace;
}

struct ProtocolRun {
    BranchDecomposition decomposition;
    Regime regime = Regime::Synchronized;
    std::array<BranchTrace, 4> traces;

    const BranchTrace& trace(Branch b) const { return traces[branch_index(b)]; }
};

inline ProtocolRun run_protocol(const SwapConfig& cfg, const Circuit& circuit, Regime regime) {
    ProtocolRun run;
    run.decomposition = decompose_initial(cfg);
    run.regime = regime;
    for (Branch b : kAllBranches)
        run.traces[branch_index(b)] = run_branch(run.decomposition.term(b).walk, circuit, regime);
    return run;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class Verdict : std::uint8_t { Inconclusive = 0, PsiPlus = 1, PsiMinus = 2 };

inline constexpr std::array<Verdict, 3> kAllVerdicts{Verdict::Inconclusive, Verdict::PsiPlus,
                                                     Verdict::PsiMinus};

inline constexpr int verdict_index(Verdict v) { return static_cast<int>(v); }

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::PsiPlus: return "psi_plus";
        case Verdict::PsiMinus: return "psi_minus";
        default: return "inconclusive";
    }
}

// Coincidences pairing one detector from each line are conclusive: D1&D3 or
// D2&D4 herald psi+, D1&D4 or D2&D3 herald psi-. Everything else (no click,
// a single click, or a same-line pair) is inconclusive.
inline Verdict classify(ClickPattern p) {
    if (!p.cross_line_pair()) return Verdict::Inconclusive;
    const bool d1 = p.contains(DetectorId::D1);
    const bool d3 = p.contains(DetectorId::D3);
    return d1 == d3 ? Verdict::PsiPlus : Verdict::PsiMinus;
}

inline std::optional<Branch> heralded_branch(Verdict v) {
    switch (v) {
        case Verdict::PsiPlus: return Branch::AntiparallelPlus;
        case Verdict::PsiMinus: return Branch::AntiparallelMinus;
        default: return std::nullopt;
    }
}

inline std::optional<BellState> heralded_remote(Verdict v) {
    const auto b = heralded_branch(v);
    if (!b) return std::nullopt;
    return remote_partner(*b);
}

inline std::array<double, 3> verdict_probabilities(const ClickDistribution& dist) {
    std::array<double, 3> p{};
    for (const auto& [pattern, prob] : dist) p[verdict_index(classify(pattern))] += prob;
    return p;
}

// ---------------------------------------------------------------------------
// Exact analysis

// State of the remote pair conditioned on one verdict. The four branches ride
// with the four orthonormal Bell states, so branch indices double as
// Bell-basis indices: posterior holds the Bell-basis diagonal of the heralded
// density matrix, coherence_max its largest cross term. The fidelity (overlap
// with the Bell state the verdict names) reads a single diagonal entry and is
// exact regardless of coherences; the concurrence uses the Bell-diagonal
// closed form max(0, 2 max_i posterior_i - 1) and is exact whenever
// coherence_max vanishes, which holds for the reference circuit.
struct HeraldReport {
    Verdict verdict = Verdict::Inconclusive;
    double probability = 0.0;  // across the whole input mixture
    std::array<double, 4> posterior{};
    double coherence_max = 0.0;
    double fidelity = 0.0;
    double concurrence = 0.0;
};

namespace detail {

template <class Key>
HeraldReport herald_report(const BranchDecomposition& dec,
                           const std::array<const SparseState<Key>*, 4>& finals, Verdict v) {
    // Amplitude over branches for every walker configuration the verdict
    // accepts; walker configurations are orthogonal, so the remote density
    // matrix is the sum of row x row outer products.
    std::map<Key, std::array<Amplitude, 4>> rows;
    for (int b = 0; b < 4; ++b) {
        const double c = dec.terms[b].coefficient;
        for (const auto& [k, amp] : finals[b]->terms())
            if (classify(click_pattern_of(k)) == v) rows[k][b] += c * amp;
    }
    std::array<std::array<Amplitude, 4>, 4> rho{};
    for (const auto& [k, row] : rows)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) rho[i][j] += row[i] * std::conj(row[j]);

    HeraldReport rep;
    rep.verdict = v;
    double trace = 0.0;
    for (int i = 0; i < 4; ++i) trace += rho[i][i].real();
    rep.probability = trace;
    if (trace <= 0.0) return rep;
    for (int i = 0; i < 4; ++i) rep.posterior[i] = rho[i][i].real() / trace;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j)
                rep.coherence_max = std::max(rep.coherence_max, std::abs(rho[i][j]) / trace);
    if (const auto hb = heralded_branch(v)) rep.fidelity = rep.posterior[branch_index(*hb)];
    const double pmax = *std::max_element(rep.posterior.begin(), rep.posterior.end());
    rep.concurrence = std::max(0.0, 2.0 * pmax - 1.0);
    return rep;
}

}  // namespace detail

struct BranchClickTable {
    Branch branch = Branch::ParallelPlus;
    double weight = 0.0;
    ClickDistribution clicks;  // conditional on the branch
};

struct ProtocolAnalysis {
    SwapConfig config;
    Regime regime = Regime::Synchronized;
    std::array<BranchClickTable, 4> branch_tables;
    ClickDistribution joint_clicks;
    std::array<double, 3> verdict_probability{};  // indexed by verdict_index
    double conclusive_probability = 0.0;
    HeraldReport psi_plus;
    HeraldReport psi_minus;

    const BranchClickTable& table(Branch b) const { return branch_tables[branch_index(b)]; }

    // Average fidelity of the heralded remote pairs, conditioned on reaching
    // a conclusive verdict at all.
    double conditional_fidelity() const {
        const double w = psi_plus.probability + psi_minus.probability;
        if (w <= 0.0) return 0.0;
        return (psi_plus.probability * psi_plus.fidelity +
                psi_minus.probability * psi_minus.fidelity) /
               w;
    }
};

inline ProtocolAnalysis analyze_protocol(const SwapConfig& cfg, const Circuit& circuit,
                                         Regime regime) {
    const ProtocolRun run = run_protocol(cfg, circuit, regime);
    ProtocolAnalysis an;
    an.config = cfg;
    an.regime = regime;
    for (Branch b : kAllBranches) {
        const BranchTrace& t = run.trace(b);
        ClickDistribution clicks = detector_distribution_lenient(t.final_state);
        const double w = run.decomposition.term(b).weight();
        for (const auto& [pattern, prob] : clicks) an.joint_clicks[pattern] += w * prob;
        an.branch_tables[branch_index(b)] = BranchClickTable{b, w, std::move(clicks)};
    }
    an.verdict_probability = verdict_probabilities(an.joint_clicks);
    an.conclusive_probability = an.verdict_probability[verdict_index(Verdict::PsiPlus)] +
                                an.verdict_probability[verdict_index(Verdict::PsiMinus)];
    if (regime == Regime::Synchronized) {
        std::array<const SymmetrizedState*, 4> finals{};
        for (int i = 0; i < 4; ++i)
            finals[i] = &std::get<SymmetrizedState>(run.traces[i].final_state);
        an.psi_plus = detail::herald_report(run.decomposition, finals, Verdict::PsiPlus);
        an.psi_minus = detail::herald_report(run.decomposition, finals, Verdict::PsiMinus);
    } else {
        std::array<const OrderedState*, 4> finals{};
        for (int i = 0; i < 4; ++i) finals[i] = &std::get<OrderedState>(run.traces[i].final_state);
        an.psi_plus = detail::herald_report(run.decomposition, finals, Verdict::PsiPlus);
        an.psi_minus = detail::herald_report(run.decomposition, finals, Verdict::PsiMinus);
    }
    return an;
}

// Closed-form probability of a conclusive verdict for the reference circuit:
// the combined weight 2 a^2 b^2 of the two antiparallel branches.
inline double success_probability(const SwapConfig& cfg) {
    cfg.validate();
    return 2.0 * cfg.a * cfg.a * cfg.b * cfg.b;
}

// ---------------------------------------------------------------------------
// Waveplate jitter

// Rebuilds every waveplate-backed coin with a single shared angle error drawn
// from N(0, sigma) radians; coins without a plate angle (identity slots,
// hand-built matrices) are left alone. One draw per call models one
// experimental run with a miscalibrated mount.
inline Circuit apply_hwp_jitter(const Circuit& circuit, double sigma_radians,
                                std::mt19937_64& rng) {
    if (sigma_radians < 0.0) throw std::invalid_argument("jitter sigma must be non-negative");
    Circuit out = circuit;
    if (sigma_radians == 0.0) return out;
    std::normal_distribution<double> noise(0.0, sigma_radians);
    const double delta_deg = noise(rng) * 180.0 / std::numbers::pi;
    for (StepDescriptor& step : out.steps) {
        for (CoinOperator* coin : {&step.coin_line2, &step.coin_line3}) {
            if (const auto angle = coin->hwp_angle_deg())
                *coin = CoinOperator::hwp(*angle + delta_deg);
        }
    }
    return out;
}

struct JitterPoint {
    double sigma = 0.0;
    double mean_conclusive_probability = 0.0;
    double conditional_fidelity = 0.0;  // success-weighted average over trials
};

// Exact per-trial analysis under fresh angle-error draws. Every sigma reuses
// the same seed, so trials are coupled draw for draw and the points of the
// curve are comparable.
inline std::vector<JitterPoint> jitter_fidelity_curve(const SwapConfig& cfg,
                                                      const Circuit& circuit, Regime regime,
                                                      std::span<const double> sigmas, int trials,
                                                      std::uint64_t seed) {
    if (trials <= 0) throw std::invalid_argument("trial count must be positive");
    std::vector<JitterPoint> curve;
    curve.reserve(sigmas.size());
    for (double sigma : sigmas) {
        std::mt19937_64 rng(seed);
        double weight_sum = 0.0;
        double fidelity_sum = 0.0;
        for (int t = 0; t < trials; ++t) {
            const Circuit jittered = apply_hwp_jitter(circuit, sigma, rng);
            const ProtocolAnalysis an = analyze_protocol(cfg, jittered, regime);
            weight_sum += an.conclusive_probability;
            fidelity_sum += an.conclusive_probability * an.conditional_fidelity();
        }
        JitterPoint p;
        p.sigma = sigma;
        p.mean_conclusive_probability = weight_sum / trials;
        p.conditional_fidelity = weight_sum > 0.0 ? fidelity_sum / weight_sum : 0.0;
        curve.push_back(p);
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Monte Carlo sampling

struct SamplerOptions {
    std::uint64_t shots = 100000;
    std::uint64_t seed = 1;
    double eta = 1.0;           // per-photon detection probability
    double jitter_sigma = 0.0;  // radians
    Regime regime = Regime::Synchronized;
};

struct ShotReport {
    std::uint64_t shots = 0;
    std::array<std::uint64_t, 3> verdict_counts{};  // indexed by verdict_index
    std::uint64_t conclusive = 0;
    std::uint64_t misclassified = 0;  // conclusive verdicts naming the wrong branch
    std::map<std::pair<Branch, ClickPattern>, std::uint64_t> pattern_counts;

    double conclusive_rate() const {
        return shots == 0 ? 0.0 : static_cast<double>(conclusive) / static_cast<double>(shots);
    }
};

namespace detail {

struct TermChoice {
    Mode first{};
    Mode second{};
};

struct BranchSampler {
    std::vector<TermChoice> terms;
    std::discrete_distribution<int> pick;
};

template <class Key>
BranchSampler make_branch_sampler(const SparseState<Key>& s) {
    BranchSampler sampler;
    std::vector<double> probs;
    for (const auto& [k, a] : s.terms()) {
        sampler.terms.push_back(TermChoice{pair_modes<Key>::a(k), pair_modes<Key>::b(k)});
        probs.push_back(std::norm(a));
    }
    sampler.pick = std::discrete_distribution<int>(probs.begin(), probs.end());
    return sampler;
}

inline BranchSampler make_branch_sampler(const FinalState& f) {
    return std::visit([](const auto& s) { return make_branch_sampler(s); }, f);
}

}  // namespace detail

// Samples whole experimental runs: branch by weight, walker configuration by
// probability, then an independent detection throw per photon. A photon off
// the detector plane never clicks; a photon on a detector clicks with
// probability eta. Non-number-resolving detectors mean a lost photon can only
// shrink the click pattern, so a conclusive verdict always comes from both
// photons of the heralding branch.
inline ShotReport sample_shots(const SwapConfig& cfg, const Circuit& circuit,
                               const SamplerOptions& opt) {
    cfg.validate();
    if (opt.shots == 0) throw std::invalid_argument("shot count must be positive");
    if (!(opt.eta >= 0.0 && opt.eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
    if (opt.jitter_sigma < 0.0) throw std::invalid_argument("jitter sigma must be non-negative");
    if (circuit.steps.empty()) throw std::invalid_argument("circuit has no steps");

    std::mt19937_64 rng(opt.seed);
    const BranchDecomposition dec = decompose_initial(cfg);
    const std::array<double, 4> weights = dec.weights();
    std::discrete_distribution<int> pick_branch(weights.begin(), weights.end());
    std::bernoulli_distribution keep(opt.eta);

    const bool fixed_circuit = opt.jitter_sigma == 0.0;
    std::array<detail::BranchSampler, 4> cached;
    if (fixed_circuit) {
        for (int b = 0; b < 4; ++b)
            cached[b] = detail::make_branch_sampler(
                run_branch(dec.terms[b].walk, circuit, opt.regime).final_state);
    }

    ShotReport report;
    report.shots = opt.shots;
    for (std::uint64_t shot = 0; shot < opt.shots; ++shot) {
        const int b = pick_branch(rng);
        detail::TermChoice term;
        if (fixed_circuit) {
            term = cached[b].terms[cached[b].pick(rng)];
        } else {
            const Circuit jittered = apply_hwp_jitter(circuit, opt.jitter_sigma, rng);
            detail::BranchSampler sampler = detail::make_branch_sampler(
                run_branch(dec.terms[b].walk, jittered, opt.regime).final_state);
            term = sampler.terms[sampler.pick(rng)];
        }
        ClickPattern pattern;
        for (const Mode& m : {term.first, term.second}) {
            const auto d = detector_at(m);
            if (d && keep(rng)) pattern.add(*d);
        }
        const Verdict v = classify(pattern);
        ++report.verdict_counts[verdict_index(v)];
        ++report.pattern_counts[{dec.terms[b].branch, pattern}];
        if (v != Verdict::Inconclusive) {
            ++report.conclusive;
            if (heralded_branch(v) != dec.terms[b].branch) ++report.misclassified;
        }
    }
    return report;
}

}  // namespace qwswap
