#pragma once

// Self-verification registry: closed-form reference states, coincidence
// tables, and invariants of the three-step protocol, evaluated against a
// given circuit. The reference values are archived here as formulas in the
// source amplitudes a and b, independent of the evolution machinery, so a
// miscalibrated or corrupted circuit makes the checks fail rather than
// silently shifting the baseline.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qwswap/core.hpp"
#include "qwswap/dsl.hpp"
#include "qwswap/protocol.hpp"
#include "qwswap/statistics.hpp"
#include "qwswap/walk.hpp"

namespace qwswap::verification {

struct CheckResult {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline CheckResult make_result(std::string name, double err, double tol, std::string note = "") {
    CheckResult r;
    r.name = std::move(name);
    r.max_error = err;
    r.tolerance = tol;
    r.pass = err <= tol;
    r.note = std::move(note);
    return r;
}

inline PhotonBasisKet pk(Polarization p, Line l, int pos) {
    return PhotonBasisKet{p, Mode{l, pos}};
}

// Closed forms of every branch's state after each step of the reference
// circuit, in terms of the source amplitudes.
struct ArchivedBranchStates {
    OrderedState post_step1;
    SymmetrizedState post_step2;
    SymmetrizedState final_synchronized;
    OrderedState final_asynchronous;
};

inline ArchivedBranchStates archived_states(Branch branch, const SwapConfig& cfg) {
    const double S = cfg.pair_purity();
    const double r = 1.0 / std::sqrt(S);
    const double q = 1.0 / (std::numbers::sqrt2 * std::sqrt(S));
    const double p = 1.0 / (2.0 * std::sqrt(S));
    const double s2 = 1.0 / std::numbers::sqrt2;
    const double a2 = cfg.a * cfg.a;
    const double b2 = cfg.b * cfg.b;

    const PhotonBasisKet H21 = pk(Polarization::H, Line::Line2, +1);
    const PhotonBasisKet V2m = pk(Polarization::V, Line::Line2, -1);
    const PhotonBasisKet H31 = pk(Polarization::H, Line::Line3, +1);
    const PhotonBasisKet V3m = pk(Polarization::V, Line::Line3, -1);
    const PhotonBasisKet H20 = pk(Polarization::H, Line::Line2, 0);
    const PhotonBasisKet V20 = pk(Polarization::V, Line::Line2, 0);
    const PhotonBasisKet H30 = pk(Polarization::H, Line::Line3, 0);
    const PhotonBasisKet V30 = pk(Polarization::V, Line::Line3, 0);

    ArchivedBranchStates out;
    auto& o1 = out.post_step1;
    auto& s2_ = out.post_step2;
    auto& fs = out.final_synchronized;
    auto& fa = out.final_asynchronous;

    switch (branch) {
        case Branch::ParallelPlus:
        case Branch::ParallelMinus: {
            const double sign = branch == Branch::ParallelPlus ? 1.0 : -1.0;
            o1.add({H21, V2m}, a2 * r);
            o1.add({V3m, H31}, sign * b2 * r);

            s2_.add(SymmetrizedKet(H20, V20), a2 * r);
            s2_.add(SymmetrizedKet(H30, V30), sign * b2 * r);

            fs.add(SymmetrizedKet(H21, H21), a2 * q);
            fs.add(SymmetrizedKet(V2m, V2m), -a2 * q);
            fs.add(SymmetrizedKet(H31, H31), sign * b2 * q);
            fs.add(SymmetrizedKet(V3m, V3m), -sign * b2 * q);

            fa.add({H21, H21}, a2 * p);
            fa.add({H21, V2m}, a2 * p);
            fa.add({V2m, H21}, -a2 * p);
            fa.add({V2m, V2m}, -a2 * p);
            fa.add({H31, H31}, sign * b2 * p);
            fa.add({H31, V3m}, -sign * b2 * p);
            fa.add({V3m, H31}, sign * b2 * p);
            fa.add({V3m, V3m}, -sign * b2 * p);
            break;
        }
        case Branch::AntiparallelPlus: {
            o1.add({H21, H31}, s2);
            o1.add({V3m, V2m}, s2);

            s2_.add(SymmetrizedKet(V20, V30), s2);
            s2_.add(SymmetrizedKet(H20, H30), s2);

            fs.add(SymmetrizedKet(H21, H31), s2);
            fs.add(SymmetrizedKet(V2m, V3m), s2);

            fa.add({H21, H31}, s2);
            fa.add({V2m, V3m}, s2);
            break;
        }
        default: {
            o1.add({H21, H31}, s2);
            o1.add({V3m, V2m}, -s2);

            s2_.add(SymmetrizedKet(V20, V30), s2);
            s2_.add(SymmetrizedKet(H20, H30), -s2);

            fs.add(SymmetrizedKet(H21, V3m), -s2);
            fs.add(SymmetrizedKet(V2m, H31), -s2);

            fa.add({H21, V3m}, -s2);
            fa.add({V2m, H31}, -s2);
            break;
        }
    }
    return out;
}

inline ClickDistribution archived_clicks(Branch branch, const SwapConfig& cfg, Regime regime) {
    const double S = cfg.pair_purity();
    const double a4 = cfg.a * cfg.a * cfg.a * cfg.a;
    const double b4 = cfg.b * cfg.b * cfg.b * cfg.b;
    using D = DetectorId;
    ClickDistribution d;
    switch (branch) {
        case Branch::ParallelPlus:
        case Branch::ParallelMinus:
            if (regime == Regime::Synchronized) {
                d[ClickPattern::of(D::D1)] = a4 / (2.0 * S);
                d[ClickPattern::of(D::D2)] = a4 / (2.0 * S);
                d[ClickPattern::of(D::D3)] = b4 / (2.0 * S);
                d[ClickPattern::of(D::D4)] = b4 / (2.0 * S);
            } else {
                d[ClickPattern::of(D::D1)] = a4 / (4.0 * S);
                d[ClickPattern::of(D::D2)] = a4 / (4.0 * S);
                d[ClickPattern::of(D::D1, D::D2)] = a4 / (2.0 * S);
                d[ClickPattern::of(D::D3)] = b4 / (4.0 * S);
                d[ClickPattern::of(D::D4)] = b4 / (4.0 * S);
                d[ClickPattern::of(D::D3, D::D4)] = b4 / (2.0 * S);
            }
            break;
        case Branch::AntiparallelPlus:
            d[ClickPattern::of(D::D1, D::D3)] = 0.5;
            d[ClickPattern::of(D::D2, D::D4)] = 0.5;
            break;
        default:
            d[ClickPattern::of(D::D1, D::D4)] = 0.5;
            d[ClickPattern::of(D::D2, D::D3)] = 0.5;
            break;
    }
    return d;
}

inline constexpr std::array<double, 2> kReferenceAmplitudes{0.70710678118654752, 0.8};

inline bool reference_shape(const Circuit& circuit) { return circuit.steps.size() == 3; }

inline CheckResult shape_failure(std::string name, double tol) {
    CheckResult r = make_result(std::move(name), 1.0, tol,
                                "circuit does not have the three-step reference shape");
    r.pass = false;
    return r;
}

inline CheckResult check_unitarity(const Circuit& circuit) {
    double worst = 0.0;
    for (const StepDescriptor& step : circuit.steps) {
        for (const CoinOperator* coin : {&step.coin_line2, &step.coin_line3}) {
            const auto& m = coin->matrix();
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    Amplitude e{0.0, 0.0};
                    for (int k = 0; k < 2; ++k) e += std::conj(m[k][i]) * m[k][j];
                    if (i == j) e -= 1.0;
                    worst = std::max(worst, std::abs(e));
                }
            }
        }
    }
    return make_result("coin operators stay unitary", worst, 1e-12);
}

inline CheckResult check_archived_mid_states(const Circuit& circuit) {
    const std::string name = "walk reproduces the archived mid-protocol states";
    const double tol = 1e-10;
    if (!reference_shape(circuit)) return shape_failure(name, tol);
    double worst = 0.0;
    for (double a : kReferenceAmplitudes) {
        const SwapConfig cfg = SwapConfig::from_a(a);
        for (Branch b : kAllBranches) {
            const ArchivedBranchStates want = archived_states(b, cfg);
            const int bound = circuit.lattice_bound();
            const OrderedState post1 =
                run_step(branch_walk_state(b, cfg), circuit.steps[0], bound);
            worst = std::max(worst, max_amplitude_error(post1, want.post_step1));
            const OrderedState post2 = run_step(post1, circuit.steps[1], bound);
            worst = std::max(worst, max_amplitude_error(symmetrize(post2), want.post_step2));
        }
    }
    return make_result(name, worst, tol);
}

inline CheckResult check_archived_finals(const Circuit& circuit, Regime regime) {
    const std::string name = std::string("walk reproduces the archived final states (") +
                             to_string(regime) + ")";
    const double tol = 1e-10;
    if (!reference_shape(circuit)) return shape_failure(name, tol);
    double worst = 0.0;
    for (double a : kReferenceAmplitudes) {
        const SwapConfig cfg = SwapConfig::from_a(a);
        for (Branch b : kAllBranches) {
            const ArchivedBranchStates want = archived_states(b, cfg);
            const BranchTrace trace = run_branch(branch_walk_state(b, cfg), circuit, regime);
            if (regime == Regime::Synchronized) {
                worst = std::max(worst,
                                 max_amplitude_error(std::get<SymmetrizedState>(trace.final_state),
                                                     want.final_synchronized));
            } else {
                worst = std::max(worst,
                                 max_amplitude_error(std::get<OrderedState>(trace.final_state),
                                                     want.final_asynchronous));
            }
        }
    }
    return make_result(name, worst, tol);
}

inline CheckResult check_click_tables(const Circuit& circuit, Regime regime) {
    const std::string name =
        std::string("coincidence tables match the archived probabilities (") + to_string(regime) +
        ")";
    const double tol = 1e-12;
    if (!reference_shape(circuit)) return shape_failure(name, tol);
    double worst = 0.0;
    for (double a : kReferenceAmplitudes) {
        const SwapConfig cfg = SwapConfig::from_a(a);
        const ProtocolAnalysis an = analyze_protocol(cfg, circuit, regime);
        for (Branch b : kAllBranches)
            worst = std::max(worst, distribution_difference(an.table(b).clicks,
                                                            archived_clicks(b, cfg, regime)));
    }
    return make_result(name, worst, tol);
}

inline CheckResult check_regime_agreement(const Circuit& circuit) {
    const std::string name = "regimes agree on coincidence observables";
    const double tol = 1e-12;
    if (!reference_shape(circuit)) return shape_failure(name, tol);
    const std::array<ClickPattern, 4> cross{
        ClickPattern::of(DetectorId::D1, DetectorId::D3),
        ClickPattern::of(DetectorId::D2, DetectorId::D4),
        ClickPattern::of(DetectorId::D1, DetectorId::D4),
        ClickPattern::of(DetectorId::D2, DetectorId::D3)};
    auto lookup = [](const ClickDistribution& d, const ClickPattern& k) {
        auto it = d.find(k);
        return it == d.end() ? 0.0 : it->second;
    };
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> pick(0.05, 0.95);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const SwapConfig cfg = SwapConfig::from_a(std::sqrt(pick(rng)));
        const ProtocolAnalysis sync = analyze_protocol(cfg, circuit, Regime::Synchronized);
        const ProtocolAnalysis async_ = analyze_protocol(cfg, circuit, Regime::Asynchronous);
        for (Branch b : kAllBranches) {
            const ClickDistribution& ds = sync.table(b).clicks;
            const ClickDistribution& da = async_.table(b).clicks;
            for (const ClickPattern& pat : cross)
                worst = std::max(worst, std::abs(lookup(ds, pat) - lookup(da, pat)));
            const auto vs = verdict_probabilities(ds);
            const auto va = verdict_probabilities(da);
            for (int v = 0; v < 3; ++v) worst = std::max(worst, std::abs(vs[v] - va[v]));
            for (Line line : {Line::Line2, Line::Line3})
                worst = std::max(worst, std::abs(line_click_probability(ds, line) -
                                                 line_click_probability(da, line)));
        }
        for (int v = 0; v < 3; ++v)
            worst = std::max(worst,
                             std::abs(sync.verdict_probability[v] - async_.verdict_probability[v]));
    }
    return make_result(name, worst, tol);
}

inline CheckResult check_heralds(const Circuit& circuit) {
    const std::string name = "heralded remote pairs are the advertised Bell states";
    const double tol = 1e-12;
    if (!reference_shape(circuit)) return shape_failure(name, tol);
    double worst = 0.0;
    for (double a : {0.70710678118654752, 0.8, 0.6}) {
        const SwapConfig cfg = SwapConfig::from_a(a);
        for (Regime regime : {Regime::Synchronized, Regime::Asynchronous}) {
            const ProtocolAnalysis an = analyze_protocol(cfg, circuit, regime);
            for (const HeraldReport* h : {&an.psi_plus, &an.psi_minus}) {
                worst = std::max(worst, std::abs(h->fidelity - 1.0));
                worst = std::max(worst, std::abs(h->concurrence - 1.0));
                worst = std::max(worst, h->coherence_max);
            }
        }
    }
    return make_result(name, worst, tol);
}

inline CheckResult check_conclusive_probability(const Circuit& circuit) {
    const std::string name = "conclusive probability matches the closed form";
    const double tol = 1e-12;
    if (!reference_shape(circuit)) return shape_failure(name, tol);
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double a = 0.05 + (0.99 - 0.05) * i / 20.0;
        const SwapConfig cfg = SwapConfig::from_a(a);
        const ProtocolAnalysis an = analyze_protocol(cfg, circuit, Regime::Synchronized);
        worst = std::max(worst, std::abs(an.conclusive_probability - success_probability(cfg)));
    }
    return make_result(name, worst, tol);
}

inline CheckResult check_single_walker(const Circuit&) {
    const OnePhotonState initial = [] {
        OnePhotonState s;
        s.add(pk(Polarization::H, Line::Line2, 0), 1.0);
        return s;
    }();
    const OnePhotonState evolved = run_single_walker(initial, CoinOperator::hadamard(), 3);
    const auto dist = position_distribution(evolved);
    const std::array<std::pair<int, double>, 4> want{
        std::pair{-3, 0.125}, std::pair{-1, 0.125}, std::pair{+1, 0.625}, std::pair{+3, 0.125}};
    double worst = 0.0;
    double covered = 0.0;
    for (const auto& [pos, p] : want) {
        const auto it = dist.find(pos);
        const double got = it == dist.end() ? 0.0 : it->second;
        worst = std::max(worst, std::abs(got - p));
        covered += got;
    }
    double total = 0.0;
    for (const auto& [pos, p] : dist) total += p;
    worst = std::max(worst, std::abs(total - covered));
    return make_result("balanced single-walker spread matches the reference distribution", worst,
                       1e-12);
}

inline CheckResult check_text_roundtrip(const Circuit&) {
    const std::string name = "circuit text round-trip is lossless";
    const double tol = 1e-12;
    const dsl::ParseResult parsed = dsl::parse_circuit(dsl::builtin_protocol_source());
    if (!parsed.ok()) return make_result(name, 1.0, tol, "built-in source failed to parse");
    const auto diff = circuit_difference(*parsed.circuit, build_protocol_circuit());
    if (!diff) return make_result(name, 1.0, tol, "parsed circuit has the wrong shape");
    double worst = *diff;
    const std::string printed = dsl::pretty_print(*parsed.circuit);
    const dsl::ParseResult reparsed = dsl::parse_circuit(printed);
    if (!reparsed.ok() || dsl::pretty_print(*reparsed.circuit) != printed)
        return make_result(name, 1.0, tol, "printed form is not a fixed point");
    const auto rediff = circuit_difference(*parsed.circuit, *reparsed.circuit);
    worst = std::max(worst, rediff.value_or(1.0));
    return make_result(name, worst, tol);
}

}  // namespace detail

inline VerificationReport run_verification(const Circuit& circuit) {
    VerificationReport report;
    report.checks.push_back(detail::check_unitarity(circuit));
    report.checks.push_back(detail::check_archived_mid_states(circuit));
    report.checks.push_back(detail::check_archived_finals(circuit, Regime::Synchronized));
    report.checks.push_back(detail::check_archived_finals(circuit, Regime::Asynchronous));
    report.checks.push_back(detail::check_click_tables(circuit, Regime::Synchronized));
    report.checks.push_back(detail::check_click_tables(circuit, Regime::Asynchronous));
    report.checks.push_back(detail::check_regime_agreement(circuit));
    report.checks.push_back(detail::check_heralds(circuit));
    report.checks.push_back(detail::check_conclusive_probability(circuit));
    report.checks.push_back(detail::check_single_walker(circuit));
    report.checks.push_back(detail::check_text_roundtrip(circuit));
    return report;
}

}  // namespace qwswap::verification
