// Acceptance gate for the swap simulator. Eight numbered end-to-end criteria
// plus one robustness note, one printed line each, nonzero exit when
// anything fails. Every expected state, probability, and distribution here
// is written out inline from its closed form so the checks do not lean on
// the library's own verification registry.

#include <qwswap/dsl.hpp>
#include <qwswap/protocol.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

using namespace qwswap;

namespace {

int failures = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const char* label, const std::string& name, bool pass, double err, double tol,
            double secs = -1.0) {
    if (!pass) ++failures;
    std::printf("%s [%s] %s: max error %.3g (tolerance %g)", label, pass ? "pass" : "FAIL",
                name.c_str(), err, tol);
    if (secs >= 0.0) std::printf(" [%.2f s]", secs);
    std::printf("\n");
}

// ---------------------------------------------------------------------------
// Closed-form branch states

const std::array<std::pair<double, double>, 5> kAmplitudePairs{{
    {1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2},
    {0.8, 0.6},
    {0.6, 0.8},
    {0.95, std::sqrt(1.0 - 0.95 * 0.95)},
    {0.3, std::sqrt(0.91)},
}};

struct BranchGoldens {
    OrderedState after_step1;
    SymmetrizedState after_step2;
    SymmetrizedState final_bunched;  // synchronized step 3
    OrderedState final_labeled;      // asynchronous step 3
};

BranchGoldens goldens(Branch branch, const SwapConfig& cfg) {
    const double a2 = cfg.a * cfg.a;
    const double b2 = cfg.b * cfg.b;
    const double r = 1.0 / std::sqrt(cfg.pair_purity());
    const double q = r / std::numbers::sqrt2;
    const double p = r / 2.0;
    const double s2 = 1.0 / std::numbers::sqrt2;

    const PhotonBasisKet h2p = ket(Polarization::H, Line::Line2, +1);
    const PhotonBasisKet v2m = ket(Polarization::V, Line::Line2, -1);
    const PhotonBasisKet h3p = ket(Polarization::H, Line::Line3, +1);
    const PhotonBasisKet v3m = ket(Polarization::V, Line::Line3, -1);
    const PhotonBasisKet h20 = ket(Polarization::H, Line::Line2, 0);
    const PhotonBasisKet v20 = ket(Polarization::V, Line::Line2, 0);
    const PhotonBasisKet h30 = ket(Polarization::H, Line::Line3, 0);
    const PhotonBasisKet v30 = ket(Polarization::V, Line::Line3, 0);

    BranchGoldens g;
    switch (branch) {
        case Branch::ParallelPlus:
        case Branch::ParallelMinus: {
            const double sign = branch == Branch::ParallelPlus ? 1.0 : -1.0;
            g.after_step1.add(OrderedPairKet{h2p, v2m}, a2 * r);
            g.after_step1.add(OrderedPairKet{v3m, h3p}, sign * b2 * r);

            g.after_step2.add(SymmetrizedKet(h20, v20), a2 * r);
            g.after_step2.add(SymmetrizedKet(h30, v30), sign * b2 * r);

            g.final_bunched.add(SymmetrizedKet(h2p, h2p), a2 * q);
            g.final_bunched.add(SymmetrizedKet(v2m, v2m), -a2 * q);
            g.final_bunched.add(SymmetrizedKet(h3p, h3p), sign * b2 * q);
            g.final_bunched.add(SymmetrizedKet(v3m, v3m), -sign * b2 * q);

            g.final_labeled.add(OrderedPairKet{h2p, h2p}, a2 * p);
            g.final_labeled.add(OrderedPairKet{h2p, v2m}, a2 * p);
            g.final_labeled.add(OrderedPairKet{v2m, h2p}, -a2 * p);
            g.final_labeled.add(OrderedPairKet{v2m, v2m}, -a2 * p);
            g.final_labeled.add(OrderedPairKet{h3p, h3p}, sign * b2 * p);
            g.final_labeled.add(OrderedPairKet{h3p, v3m}, -sign * b2 * p);
            g.final_labeled.add(OrderedPairKet{v3m, h3p}, sign * b2 * p);
            g.final_labeled.add(OrderedPairKet{v3m, v3m}, -sign * b2 * p);
            break;
        }
        case Branch::AntiparallelPlus:
        case Branch::AntiparallelMinus: {
            const double sign = branch == Branch::AntiparallelPlus ? 1.0 : -1.0;
            g.after_step1.add(OrderedPairKet{h2p, h3p}, s2);
            g.after_step1.add(OrderedPairKet{v3m, v2m}, sign * s2);

            g.after_step2.add(SymmetrizedKet(v20, v30), s2);
            g.after_step2.add(SymmetrizedKet(h20, h30), sign * s2);

            if (branch == Branch::AntiparallelPlus) {
                g.final_bunched.add(SymmetrizedKet(h2p, h3p), s2);
                g.final_bunched.add(SymmetrizedKet(v2m, v3m), s2);
                g.final_labeled.add(OrderedPairKet{h2p, h3p}, s2);
                g.final_labeled.add(OrderedPairKet{v2m, v3m}, s2);
            } else {
                g.final_bunched.add(SymmetrizedKet(h2p, v3m), -s2);
                g.final_bunched.add(SymmetrizedKet(v2m, h3p), -s2);
                g.final_labeled.add(OrderedPairKet{h2p, v3m}, -s2);
                g.final_labeled.add(OrderedPairKet{v2m, h3p}, -s2);
            }
            break;
        }
    }
    return g;
}

ClickDistribution expected_bunched_clicks(Branch branch, const SwapConfig& cfg) {
    using D = DetectorId;
    const double s = cfg.pair_purity();
    const double a4 = cfg.a * cfg.a * cfg.a * cfg.a;
    const double b4 = cfg.b * cfg.b * cfg.b * cfg.b;
    switch (branch) {
        case Branch::ParallelPlus:
        case Branch::ParallelMinus:
            return {{ClickPattern::of(D::D1), a4 / (2.0 * s)},
                    {ClickPattern::of(D::D2), a4 / (2.0 * s)},
                    {ClickPattern::of(D::D3), b4 / (2.0 * s)},
                    {ClickPattern::of(D::D4), b4 / (2.0 * s)}};
        case Branch::AntiparallelPlus:
            return {{ClickPattern::of(D::D1, D::D3), 0.5}, {ClickPattern::of(D::D2, D::D4), 0.5}};
        default:
            return {{ClickPattern::of(D::D1, D::D4), 0.5}, {ClickPattern::of(D::D2, D::D3), 0.5}};
    }
}

// ---------------------------------------------------------------------------
// Criteria

void criterion_1(const Circuit& circuit) {
    const auto start = Clock::now();
    double worst = 0.0;
    for (const auto& [a, b] : kAmplitudePairs) {
        const SwapConfig cfg{a, b};
        for (const Branch branch : kAllBranches) {
            const BranchGoldens g = goldens(branch, cfg);
            const BranchTrace t =
                run_branch(branch_walk_state(branch, cfg), circuit, Regime::Synchronized);
            worst = std::max(worst, max_amplitude_error(g.after_step1, t.labeled[0], true));
            worst = std::max(worst,
                             max_amplitude_error(g.after_step2, symmetrize(t.labeled[1]), true));
            worst = std::max(
                worst, max_amplitude_error(g.final_bunched,
                                           std::get<SymmetrizedState>(t.final_state), true));
        }
    }
    const double secs = seconds_since(start);
    report("criterion 1", "branch states after each step match their closed forms",
           worst < 1e-10 && secs < 1.0, worst, 1e-10, secs);
}

void criterion_2(const Circuit& circuit) {
    double worst = 0.0;
    bool supports_match = true;
    for (const auto& [a, b] : kAmplitudePairs) {
        const SwapConfig cfg{a, b};
        for (const Branch branch : kAllBranches) {
            const BranchTrace t =
                run_branch(branch_walk_state(branch, cfg), circuit, Regime::Synchronized);
            const ClickDistribution got = detector_distribution(t.final_state);
            const ClickDistribution want = expected_bunched_clicks(branch, cfg);

            if (got.size() != want.size()) supports_match = false;
            for (const auto& [pattern, prob] : want) {
                const auto it = got.find(pattern);
                if (it == got.end()) {
                    supports_match = false;
                    continue;
                }
                worst = std::max(worst, std::abs(it->second - prob));
            }
            const bool parallel =
                branch == Branch::ParallelPlus || branch == Branch::ParallelMinus;
            for (const auto& [pattern, prob] : got)
                if (parallel ? pattern.click_count() != 1 : !pattern.cross_line_pair())
                    supports_match = false;
        }
    }
    report("criterion 2", "detector supports are exact and probabilities closed-form",
           supports_match && worst < 1e-12, worst, 1e-12);
}

void criterion_3(const Circuit& circuit) {
    std::mt19937_64 rng(0xACC3u);
    std::uniform_real_distribution<double> weight(0.05, 0.95);

    double worst_coincidence = 0.0;  // regime-independent observables
    double worst_labeled = 0.0;      // asynchronous finals against closed forms
    for (int sample = 0; sample < 10; ++sample) {
        const SwapConfig cfg = SwapConfig::from_a(std::sqrt(weight(rng)));
        const BranchDecomposition dec = decompose_initial(cfg);

        std::array<double, 3> joint_sync{};
        std::array<double, 3> joint_async{};
        for (const Branch branch : kAllBranches) {
            const OrderedState& input = dec.term(branch).walk;
            const BranchTrace sync = run_branch(input, circuit, Regime::Synchronized);
            const BranchTrace async = run_branch(input, circuit, Regime::Asynchronous);
            const ClickDistribution d_sync = detector_distribution(sync.final_state);
            const ClickDistribution d_async = detector_distribution(async.final_state);

            // Interference-free observables must agree between regimes:
            // verdict probabilities and per-line click probabilities always,
            // and for the heralding branches the full distributions.
            const std::array<double, 3> v_sync = verdict_probabilities(d_sync);
            const std::array<double, 3> v_async = verdict_probabilities(d_async);
            for (int v = 0; v < 3; ++v) {
                worst_coincidence = std::max(worst_coincidence, std::abs(v_sync[v] - v_async[v]));
                joint_sync[v] += dec.term(branch).weight() * v_sync[v];
                joint_async[v] += dec.term(branch).weight() * v_async[v];
            }
            for (const Line line : {Line::Line2, Line::Line3})
                worst_coincidence = std::max(
                    worst_coincidence, std::abs(line_click_probability(d_sync, line) -
                                                line_click_probability(d_async, line)));
            if (branch == Branch::AntiparallelPlus || branch == Branch::AntiparallelMinus)
                worst_coincidence =
                    std::max(worst_coincidence, distribution_difference(d_sync, d_async));

            const BranchGoldens g = goldens(branch, cfg);
            worst_labeled = std::max(
                worst_labeled, max_amplitude_error(g.final_labeled,
                                                   std::get<OrderedState>(async.final_state), true));
        }
        for (int v = 0; v < 3; ++v)
            worst_coincidence = std::max(worst_coincidence, std::abs(joint_sync[v] - joint_async[v]));
    }
    const bool pass = worst_coincidence < 1e-12 && worst_labeled < 1e-10;
    char name[160];
    std::snprintf(name, sizeof name,
                  "regimes agree on click statistics (labeled finals off by %.3g, tolerance 1e-10)",
                  worst_labeled);
    report("criterion 3", name, pass, worst_coincidence, 1e-12);
}

void criterion_4() {
    double worst = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const SwapConfig cfg = SwapConfig::from_a(k / 101.0);
        const std::array<double, 4> w = decompose_initial(cfg).weights();
        const double heralding_weight =
            w[branch_index(Branch::AntiparallelPlus)] + w[branch_index(Branch::AntiparallelMinus)];
        const double closed = 2.0 * cfg.a * cfg.a * cfg.b * cfg.b;
        worst = std::max(worst, std::abs(heralding_weight - closed));
        worst = std::max(worst, std::abs(success_probability(cfg) - closed));
    }

    // Ternary search stays reliable only while the bracketed values differ by
    // more than rounding noise, so stop it around width 1e-5 and polish with
    // two three-point parabolic vertex steps.
    const auto f = [](double a) { return success_probability(SwapConfig::from_a(a)); };
    double lo = 0.01;
    double hi = 0.99;
    for (int i = 0; i < 30; ++i) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) < f(m2))
            lo = m1;
        else
            hi = m2;
    }
    double amax = 0.5 * (lo + hi);
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i) {
        const double fm = f(amax - h);
        const double f0 = f(amax);
        const double fp = f(amax + h);
        const double curvature = fp - 2.0 * f0 + fm;
        if (curvature < 0.0) amax -= h * (fp - fm) / (2.0 * curvature);
    }
    const double offset = std::abs(amax - 1.0 / std::numbers::sqrt2);
    const double peak_gap = std::abs(success_probability(SwapConfig::from_a(amax)) - 0.5);

    const bool pass = worst < 1e-12 && offset <= 1e-9 && peak_gap < 1e-12;
    char name[160];
    std::snprintf(name, sizeof name,
                  "conclusive probability is 2 a^2 b^2, peaking at 0.5 (argmax off by %.3g)",
                  offset);
    report("criterion 4", name, pass, std::max(worst, peak_gap), 1e-12);
}

void criterion_5(const Circuit& circuit) {
    double worst = 0.0;
    for (const Regime regime : {Regime::Synchronized, Regime::Asynchronous}) {
        for (const auto& [a, b] : kAmplitudePairs) {
            const SwapConfig cfg{a, b};
            const ProtocolRun run = run_protocol(cfg, circuit, regime);

            for (const Verdict verdict : {Verdict::PsiPlus, Verdict::PsiMinus}) {
                // Remote-pair density matrix conditioned on the verdict,
                // rebuilt from scratch: walker configurations are orthogonal,
                // so each accepted configuration contributes one outer
                // product of its remote amplitude vector.
                std::map<std::string, std::array<Amplitude, 4>> vectors;
                for (const Branch branch : kAllBranches) {
                    const BranchTerm& term = run.decomposition.term(branch);
                    auto visit_state = [&](const auto& state) {
                        for (const auto& [k, amp] : state.terms()) {
                            if (classify(click_pattern_of(k)) != verdict) continue;
                            auto& v = vectors[to_string(k)];
                            for (int i = 0; i < 4; ++i)
                                v[i] += term.coefficient * amp * term.remote.amp[i];
                        }
                    };
                    std::visit(visit_state, run.trace(branch).final_state);
                }

                std::array<std::array<Amplitude, 4>, 4> rho{};
                for (const auto& [key, v] : vectors)
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j) rho[i][j] += v[i] * std::conj(v[j]);
                double trace = 0.0;
                for (int i = 0; i < 4; ++i) trace += rho[i][i].real();

                // The remote pair must be pure and sit exactly on the
                // advertised maximally entangled target.
                const double s2 = 1.0 / std::numbers::sqrt2;
                const std::array<Amplitude, 4> target =
                    verdict == Verdict::PsiPlus
                        ? std::array<Amplitude, 4>{Amplitude{}, Amplitude{s2, 0.0},
                                                   Amplitude{s2, 0.0}, Amplitude{}}
                        : std::array<Amplitude, 4>{Amplitude{}, Amplitude{s2, 0.0},
                                                   Amplitude{-s2, 0.0}, Amplitude{}};
                Amplitude overlap{};
                double purity_num = 0.0;
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) {
                        overlap += std::conj(target[i]) * rho[i][j] * target[j];
                        purity_num += std::norm(rho[i][j]);
                    }
                const double fidelity_direct = overlap.real() / trace;
                const double purity = purity_num / (trace * trace);

                const auto* best = &vectors.begin()->second;
                double best_norm = 0.0;
                for (const auto& [key, v] : vectors) {
                    double n = 0.0;
                    for (const Amplitude& c : v) n += std::norm(c);
                    if (n > best_norm) {
                        best_norm = n;
                        best = &v;
                    }
                }
                const double concurrence_direct =
                    2.0 * std::abs((*best)[0] * (*best)[3] - (*best)[1] * (*best)[2]) / best_norm;

                worst = std::max({worst, std::abs(fidelity_direct - 1.0),
                                  std::abs(concurrence_direct - 1.0), std::abs(purity - 1.0)});

                // And the analysis pipeline must agree with the rebuild.
                const ProtocolAnalysis an = analyze_protocol(cfg, circuit, regime);
                const HeraldReport& rep =
                    verdict == Verdict::PsiPlus ? an.psi_plus : an.psi_minus;
                worst = std::max({worst, std::abs(rep.fidelity - 1.0),
                                  std::abs(rep.concurrence - 1.0)});
            }
        }
    }
    report("criterion 5", "heralded remote pairs have unit fidelity and concurrence",
           worst < 1e-12, worst, 1e-12);
}

void criterion_6(const Circuit& circuit) {
    const auto start = Clock::now();
    SamplerOptions opt;
    opt.shots = 100000;
    opt.seed = 7;
    opt.eta = 0.93;
    const ShotReport rep = sample_shots(SwapConfig{}, circuit, opt);
    const double secs = seconds_since(start);

    const double expected = 0.43245;  // 2 a^2 b^2 eta^2 at a = b
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(opt.shots));
    const double deviation = std::abs(rep.conclusive_rate() - expected);

    const bool pass = deviation <= 3.0 * sigma && rep.misclassified == 0 && secs < 10.0;
    char name[160];
    std::snprintf(name, sizeof name,
                  "sampled conclusive rate within 3 sigma of %.5f with %llu misclassifications",
                  expected, static_cast<unsigned long long>(rep.misclassified));
    report("criterion 6", name, pass, deviation, 3.0 * sigma, secs);
}

void criterion_7() {
    // Reference expansion, written as plain recurrences on dense complex
    // amplitudes: balanced coin mixes (H, V) -> ((H+V), (H-V)) / sqrt(2),
    // then H hops right and V hops left.
    std::map<int, std::array<Amplitude, 2>> amps{{0, {Amplitude{1.0, 0.0}, Amplitude{}}}};
    const double h = 1.0 / std::numbers::sqrt2;
    for (int step = 0; step < 3; ++step) {
        std::map<int, std::array<Amplitude, 2>> next;
        for (const auto& [x, hv] : amps) {
            next[x + 1][0] += h * (hv[0] + hv[1]);
            next[x - 1][1] += h * (hv[0] - hv[1]);
        }
        amps = std::move(next);
    }
    std::map<int, double> reference;
    for (const auto& [x, hv] : amps) {
        const double prob = std::norm(hv[0]) + std::norm(hv[1]);
        if (prob > 1e-15) reference[x] = prob;
    }

    OnePhotonState start;
    start.add(ket(Polarization::H, Line::Line2, 0), Amplitude{1.0, 0.0});
    const std::map<int, double> walked =
        position_distribution(run_single_walker(start, CoinOperator::hadamard(), 3));

    const std::map<int, double> frozen{{-3, 0.125}, {-1, 0.125}, {+1, 0.625}, {+3, 0.125}};
    double worst = 0.0;
    for (const auto& table : {reference, frozen}) {
        for (const auto& [x, p] : table) {
            const auto it = walked.find(x);
            worst = std::max(worst, std::abs((it == walked.end() ? 0.0 : it->second) - p));
        }
        for (const auto& [x, p] : walked) {
            const auto it = table.find(x);
            worst = std::max(worst, std::abs((it == table.end() ? 0.0 : it->second) - p));
        }
    }
    report("criterion 7", "three balanced walk steps match the frozen reference expansion",
           worst < 1e-12, worst, 1e-12);
}

Circuit random_expressible_circuit(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> step_count(1, 4);
    std::uniform_int_distribution<int> retarder_count(0, 2);
    std::uniform_int_distribution<int> coin_kind(0, 2);
    std::uniform_int_distribution<int> position(-3, 3);
    std::uniform_real_distribution<double> angle(-90.0, 90.0);
    std::uniform_real_distribution<double> phase(-3.2, 3.2);
    std::bernoulli_distribution flag(0.5);

    Circuit c;
    const int n = step_count(rng);
    for (int i = 0; i < n; ++i) {
        StepDescriptor s;
        const int retarders = retarder_count(rng);
        for (int r = 0; r < retarders; ++r)
            s.retarders.push_back(
                PhaseRetarder{flag(rng) ? Line::Line2 : Line::Line3, position(rng), phase(rng)});
        s.coin_line2 = coin_kind(rng) == 0 ? CoinOperator::identity() : CoinOperator::hwp(angle(rng));
        s.coin_line3 = coin_kind(rng) == 0 ? CoinOperator::identity() : CoinOperator::hwp(angle(rng));
        s.do_shift = flag(rng);
        if (flag(rng)) s.exchange = ExchangeRule{position(rng)};
        c.steps.push_back(std::move(s));
    }
    return c;
}

void criterion_8(const Circuit& circuit) {
    double worst = 0.0;
    bool pass = true;

    const dsl::ParseResult builtin = dsl::parse_circuit(dsl::builtin_protocol_source());
    if (!builtin.ok()) {
        pass = false;
    } else {
        const auto diff = circuit_difference(*builtin.circuit, circuit);
        if (!diff) pass = false;
        worst = std::max(worst, diff.value_or(1.0));

        const std::string text = dsl::pretty_print(*builtin.circuit);
        const dsl::ParseResult again = dsl::parse_circuit(text);
        if (!again.ok() || dsl::pretty_print(*again.circuit) != text) pass = false;
    }

    std::mt19937_64 rng(0xF0CCu);
    for (int trial = 0; trial < 20; ++trial) {
        const Circuit original = random_expressible_circuit(rng);
        const std::string text = dsl::pretty_print(original);
        const dsl::ParseResult parsed = dsl::parse_circuit(text);
        if (!parsed.ok()) {
            pass = false;
            continue;
        }
        const auto diff = circuit_difference(original, *parsed.circuit);
        if (!diff) pass = false;
        worst = std::max(worst, diff.value_or(1.0));
        if (dsl::pretty_print(*parsed.circuit) != text) pass = false;
    }

    report("criterion 8", "circuit text round-trips through parse and print",
           pass && worst < 1e-12, worst, 1e-12);
}

void jitter_note(const Circuit& circuit) {
    const std::array<double, 4> sigmas{0.0, 0.005, 0.01, 0.02};
    const std::vector<JitterPoint> curve = jitter_fidelity_curve(
        SwapConfig{}, circuit, Regime::Synchronized, sigmas, 200, 20240819);

    bool monotone = std::abs(curve[0].conditional_fidelity - 1.0) < 1e-12;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].conditional_fidelity > curve[i - 1].conditional_fidelity) monotone = false;

    if (!monotone) ++failures;
    std::printf("note        [%s] heralded fidelity degrades monotonically with waveplate jitter:",
                monotone ? "pass" : "FAIL");
    for (const JitterPoint& p : curve) std::printf(" %.6f", p.conditional_fidelity);
    std::printf(" (sigma = 0, 0.005, 0.01, 0.02 rad; 200 trials)\n");
}

}  // namespace

int main() {
    const Circuit circuit = build_protocol_circuit();
    criterion_1(circuit);
    criterion_2(circuit);
    criterion_3(circuit);
    criterion_4();
    criterion_5(circuit);
    criterion_6(circuit);
    criterion_7();
    criterion_8(circuit);
    jitter_note(circuit);

    if (failures == 0) {
        std::printf("acceptance: all criteria satisfied\n");
        return 0;
    }
    std::printf("acceptance: %d line(s) failed\n", failures);
    return 1;
}
