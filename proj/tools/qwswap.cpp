// Command-line front end: exact simulation, success-probability sweeps,
// Monte Carlo sampling, self-verification, and single-walker spreads.
//
// Exit codes: 0 success, 1 verification failure, 2 bad arguments or runtime
// error, 3 circuit file parse error.

#include <array>
#include <charconv>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwswap/core.hpp"
#include "qwswap/dsl.hpp"
#include "qwswap/protocol.hpp"
#include "qwswap/statistics.hpp"
#include "qwswap/verification.hpp"
#include "qwswap/walk.hpp"

namespace {

using namespace qwswap;

std::string fmt(double v) {
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

Regime regime_from_string(const std::string& s) {
    return s == "async" ? Regime::Asynchronous : Regime::Synchronized;
}

// Loads a circuit from a file, or falls back to the reference circuit.
// Diagnostics go to stderr; a parse error is reported through the exit code.
std::optional<Circuit> load_circuit(const std::string& path, int& exit_code) {
    if (path.empty()) return build_protocol_circuit();
    const dsl::ParseResult parsed = dsl::parse_circuit_file(path);
    for (const dsl::CompileDiagnostic& d : parsed.diagnostics)
        std::cerr << path << ": " << d.to_string() << "\n";
    if (!parsed.ok()) {
        exit_code = 3;
        return std::nullopt;
    }
    return parsed.circuit;
}

struct SimulateArgs {
    double a = 1.0 / std::numbers::sqrt2;
    std::string regime = "sync";
    std::string circuit_path;
};

int run_simulate(const SimulateArgs& args) {
    int exit_code = 2;
    const auto circuit = load_circuit(args.circuit_path, exit_code);
    if (!circuit) return exit_code;
    const SwapConfig cfg = SwapConfig::from_a(args.a);
    const Regime regime = regime_from_string(args.regime);
    const ProtocolAnalysis an = analyze_protocol(cfg, *circuit, regime);

    std::cout << "swap simulation\n";
    std::cout << "a = " << fmt(cfg.a) << ", b = " << fmt(cfg.b) << ", regime = "
              << to_string(regime) << "\n";
    std::cout << "conclusive probability = " << fmt(an.conclusive_probability) << "\n";
    if (args.circuit_path.empty())
        std::cout << "closed form 2 a^2 b^2 = " << fmt(success_probability(cfg)) << "\n";
    for (const HeraldReport* h : {&an.psi_plus, &an.psi_minus}) {
        std::cout << "verdict " << to_string(h->verdict) << ": probability = "
                  << fmt(h->probability) << ", fidelity = " << fmt(h->fidelity)
                  << ", concurrence = " << fmt(h->concurrence) << "\n";
    }
    for (Branch b : kAllBranches) {
        const BranchClickTable& table = an.table(b);
        std::cout << "branch " << branch_label(b) << " (weight = " << fmt(table.weight) << ")\n";
        for (const auto& [pattern, prob] : table.clicks)
            std::cout << "  " << pattern.name() << " -> " << fmt(prob) << "\n";
    }
    return 0;
}

struct SweepArgs {
    double a_min = 0.1;
    double a_max = 0.9;
    int points = 17;
    double eta = 1.0;
    std::string format = "csv";
};

int run_sweep(const SweepArgs& args) {
    if (args.a_min > args.a_max) {
        std::cerr << "error: --a-min must not exceed --a-max\n";
        return 2;
    }
    std::vector<std::array<double, 3>> rows;
    for (int i = 0; i < args.points; ++i) {
        const double t = args.points == 1 ? 0.0 : static_cast<double>(i) / (args.points - 1);
        const double a = args.a_min + (args.a_max - args.a_min) * t;
        const double p = success_probability(SwapConfig::from_a(a));
        rows.push_back({a, p, p * args.eta * args.eta});
    }
    if (args.format == "json") {
        nlohmann::json doc;
        doc["eta"] = args.eta;
        doc["points"] = nlohmann::json::array();
        for (const auto& row : rows) {
            doc["points"].push_back({{"a", row[0]},
                                     {"p_success", row[1]},
                                     {"p_success_eta", row[2]}});
        }
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "a,p_success,p_success_eta\n";
        for (const auto& row : rows)
            std::cout << fmt(row[0]) << "," << fmt(row[1]) << "," << fmt(row[2]) << "\n";
    }
    return 0;
}

struct SampleArgs {
    double a = 1.0 / std::numbers::sqrt2;
    std::uint64_t shots = 100000;
    std::uint64_t seed = 1;
    double eta = 1.0;
    double jitter_sigma = 0.0;
    std::string regime = "sync";
    std::string circuit_path;
};

int run_sample(const SampleArgs& args) {
    int exit_code = 2;
    const auto circuit = load_circuit(args.circuit_path, exit_code);
    if (!circuit) return exit_code;
    const SwapConfig cfg = SwapConfig::from_a(args.a);
    SamplerOptions opt;
    opt.shots = args.shots;
    opt.seed = args.seed;
    opt.eta = args.eta;
    opt.jitter_sigma = args.jitter_sigma;
    opt.regime = regime_from_string(args.regime);
    const ShotReport report = sample_shots(cfg, *circuit, opt);

    std::cout << "sample report\n";
    std::cout << "a = " << fmt(cfg.a) << ", b = " << fmt(cfg.b) << ", regime = "
              << to_string(opt.regime) << "\n";
    std::cout << "shots = " << report.shots << ", seed = " << args.seed << ", eta = "
              << fmt(args.eta) << ", jitter sigma = " << fmt(args.jitter_sigma) << "\n";
    std::cout << "conclusive = " << report.conclusive << " (rate = "
              << fmt(report.conclusive_rate()) << ")\n";
    if (args.circuit_path.empty() && args.jitter_sigma == 0.0)
        std::cout << "expected conclusive rate = "
                  << fmt(success_probability(cfg) * args.eta * args.eta) << "\n";
    std::cout << "verdict psi_plus = " << report.verdict_counts[verdict_index(Verdict::PsiPlus)]
              << "\n";
    std::cout << "verdict psi_minus = " << report.verdict_counts[verdict_index(Verdict::PsiMinus)]
              << "\n";
    std::cout << "inconclusive = " << report.verdict_counts[verdict_index(Verdict::Inconclusive)]
              << "\n";
    std::cout << "misclassified conclusive verdicts = " << report.misclassified << "\n";
    return 0;
}

struct VerifyArgs {
    bool corrupt_coin = false;
};

int run_verify(const VerifyArgs& args) {
    Circuit circuit = build_protocol_circuit();
    if (args.corrupt_coin) circuit.steps[2].coin_line2 = CoinOperator::hwp(32.5);
    const verification::VerificationReport report = verification::run_verification(circuit);
    int failed = 0;
    for (const verification::CheckResult& c : report.checks) {
        std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << " (max error = "
                  << fmt(c.max_error) << ", tolerance = " << fmt(c.tolerance) << ")";
        if (!c.note.empty()) std::cout << " [" << c.note << "]";
        std::cout << "\n";
        if (!c.pass) ++failed;
    }
    if (failed == 0) {
        std::cout << "all " << report.checks.size() << " checks passed\n";
        return 0;
    }
    std::cout << failed << " of " << report.checks.size() << " checks failed\n";
    return 1;
}

struct WalkArgs {
    double coin_angle = 22.5;
    int steps = 3;
    std::string initial_pol = "H";
};

int run_walk(const WalkArgs& args) {
    OnePhotonState initial;
    const Polarization pol = args.initial_pol == "V" ? Polarization::V : Polarization::H;
    initial.add(PhotonBasisKet{pol, Mode{Line::Line2, 0}}, 1.0);
    const OnePhotonState evolved =
        run_single_walker(initial, CoinOperator::hwp(args.coin_angle), args.steps);
    std::cout << "single-walker walk: " << args.steps << " steps, coin angle = "
              << fmt(args.coin_angle) << " deg, initial polarization = "
              << pol_char(pol) << "\n";
    for (const auto& [position, prob] : position_distribution(evolved))
        std::cout << "position " << (position >= 0 ? "+" : "") << position << ": " << fmt(prob)
                  << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-photon walk entanglement swap simulator"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "exact per-branch protocol analysis");
    sim->add_option("--a", sim_args.a, "amplitude a of a|HH> + b|VV>, with b = sqrt(1 - a^2)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sim->add_option("--regime", sim_args.regime, "arrival regime for the last step")
        ->check(CLI::IsMember({"sync", "async"}))
        ->capture_default_str();
    sim->add_option("--circuit", sim_args.circuit_path, "circuit description file (.qwc)");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "success probability across source amplitudes");
    sweep->add_option("--a-min", sweep_args.a_min, "smallest amplitude a")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sweep->add_option("--a-max", sweep_args.a_max, "largest amplitude a")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sweep->add_option("--points", sweep_args.points, "number of grid points")
        ->check(CLI::Range(1, 1000000))
        ->capture_default_str();
    sweep->add_option("--eta", sweep_args.eta, "per-photon detection efficiency")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sweep->add_option("--format", sweep_args.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    SampleArgs sample_args;
    CLI::App* sample = app.add_subcommand("sample", "Monte Carlo shot sampling with loss");
    sample->add_option("--a", sample_args.a, "amplitude a of a|HH> + b|VV>")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sample->add_option("--shots", sample_args.shots, "number of simulated runs")
        ->capture_default_str();
    sample->add_option("--seed", sample_args.seed, "random seed")->capture_default_str();
    sample->add_option("--eta", sample_args.eta, "per-photon detection efficiency")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sample->add_option("--jitter-sigma", sample_args.jitter_sigma,
                       "stddev of the waveplate angle error, radians")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sample->add_option("--regime", sample_args.regime, "arrival regime for the last step")
        ->check(CLI::IsMember({"sync", "async"}))
        ->capture_default_str();
    sample->add_option("--circuit", sample_args.circuit_path, "circuit description file (.qwc)");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "run the self-verification checks");
    verify->add_flag("--corrupt-coin", verify_args.corrupt_coin)->group("");

    WalkArgs walk_args;
    CLI::App* walk = app.add_subcommand("walk", "single-walker position spread");
    walk->add_option("--coin-angle", walk_args.coin_angle, "waveplate angle in degrees")
        ->capture_default_str();
    walk->add_option("--steps", walk_args.steps, "number of steps")
        ->check(CLI::Range(0, 64))
        ->capture_default_str();
    walk->add_option("--initial-pol", walk_args.initial_pol, "initial polarization")
        ->check(CLI::IsMember({"H", "V"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
        if (sample->parsed()) return run_sample(sample_args);
        if (verify->parsed()) return run_verify(verify_args);
        if (walk->parsed()) return run_walk(walk_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
