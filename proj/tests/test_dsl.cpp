#include <catch2/catch_amalgamated.hpp>

#include <qwswap/dsl.hpp>
#include <qwswap/protocol.hpp>

#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

using namespace qwswap;

namespace {

bool has_error_containing(const dsl::ParseResult& r, const std::string& needle, int line = -1,
                          int column = -1) {
    for (const dsl::CompileDiagnostic& d : r.diagnostics) {
        if (d.severity != dsl::Severity::Error) continue;
        if (d.message.find(needle) == std::string::npos) continue;
        if (line >= 0 && d.line != line) continue;
        if (column >= 0 && d.column != column) continue;
        return true;
    }
    return false;
}

Circuit random_expressible_circuit(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> step_count(1, 4);
    std::uniform_int_distribution<int> retarder_count(0, 2);
    std::uniform_int_distribution<int> coin_kind(0, 2);
    std::uniform_int_distribution<int> position(-3, 3);
    std::uniform_real_distribution<double> angle(-90.0, 90.0);
    std::uniform_real_distribution<double> phase(-3.2, 3.2);
    std::bernoulli_distribution flag(0.5);
    std::bernoulli_distribution mostly(0.9);

    Circuit c;
    const int n = step_count(rng);
    for (int i = 0; i < n; ++i) {
        StepDescriptor s;
        const int retarders = retarder_count(rng);
        for (int r = 0; r < retarders; ++r)
            s.retarders.push_back(
                PhaseRetarder{flag(rng) ? Line::Line2 : Line::Line3, position(rng), phase(rng)});
        auto pick_coin = [&]() {
            return coin_kind(rng) == 0 ? CoinOperator::identity() : CoinOperator::hwp(angle(rng));
        };
        s.coin_line2 = pick_coin();
        s.coin_line3 = pick_coin();
        s.do_shift = mostly(rng);
        if (flag(rng)) s.exchange = ExchangeRule{position(rng)};
        c.steps.push_back(std::move(s));
    }
    return c;
}

}  // namespace

TEST_CASE("the builtin source parses to the reference circuit", "[dsl]") {
    const dsl::ParseResult r = dsl::parse_circuit(dsl::builtin_protocol_source());
    REQUIRE(r.ok());
    REQUIRE(r.diagnostics.empty());
    const auto diff = circuit_difference(*r.circuit, build_protocol_circuit());
    REQUIRE(diff.has_value());
    REQUIRE(*diff == 0.0);
}

TEST_CASE("printing is a fixed point of parse-then-print", "[dsl]") {
    const dsl::ParseResult first = dsl::parse_circuit(dsl::builtin_protocol_source());
    REQUIRE(first.ok());
    const std::string text = dsl::pretty_print(*first.circuit);

    const dsl::ParseResult second = dsl::parse_circuit(text);
    REQUIRE(second.ok());
    REQUIRE(second.diagnostics.empty());
    REQUIRE(dsl::pretty_print(*second.circuit) == text);
    REQUIRE(circuit_difference(*first.circuit, *second.circuit) == 0.0);
}

TEST_CASE("raw matrix coins have no textual spelling", "[dsl]") {
    CoinOperator::Matrix phase{{{Amplitude{0.0, 1.0}, Amplitude{0.0, 0.0}},
                                {Amplitude{0.0, 0.0}, Amplitude{0.0, -1.0}}}};
    Circuit c;
    c.steps.push_back(StepDescriptor{});
    c.steps[0].coin_line2 = CoinOperator::from_matrix(phase);
    REQUIRE_THROWS_AS(dsl::pretty_print(c), std::invalid_argument);
}

TEST_CASE("parse errors carry source locations", "[dsl]") {
    SECTION("unknown statement keyword") {
        const dsl::ParseResult r = dsl::parse_circuit("step 1 { flip }");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "unknown statement keyword 'flip'", 1, 10));
    }

    SECTION("a line can only carry one coin per step") {
        const dsl::ParseResult r =
            dsl::parse_circuit("step 1 {\ncoin line2 I\ncoin line2 HWP 45\n}");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "line2 already has a coin in this step", 3, 1));
    }

    SECTION("duplicate shift") {
        const dsl::ParseResult r = dsl::parse_circuit("step 1 { shift shift }");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "duplicate shift in this step"));
    }

    SECTION("step numbers count up from one") {
        const dsl::ParseResult r = dsl::parse_circuit("step 2 { shift }");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(
            r, "step numbers must be consecutive starting at 1 (expected 1, found 2)", 1, 6));
    }

    SECTION("unknown line names are spelled out") {
        const dsl::ParseResult r = dsl::parse_circuit("step 1 { coin line4 I }");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "unknown line 'line4' (expected line2 or line3)"));
    }

    SECTION("angles must be finite numbers") {
        const dsl::ParseResult r = dsl::parse_circuit("step 1 { coin line2 HWP pancake }");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "expected a finite number, found 'pancake'"));
    }

    SECTION("a step must be closed before the input ends") {
        const dsl::ParseResult r = dsl::parse_circuit("step 1 { shift");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "expected '}' before end of input"));
    }

    SECTION("a step must be closed before the next one opens") {
        const dsl::ParseResult r = dsl::parse_circuit("step 1 { shift step 2 { shift }");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "expected '}' before the next step"));
    }

    SECTION("empty input") {
        const dsl::ParseResult r = dsl::parse_circuit("   # nothing here\n");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "circuit must contain at least one step", 1, 1));
    }

    SECTION("exchange needs its position assignment") {
        const dsl::ParseResult r = dsl::parse_circuit("step 1 { exchange -1 }");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "expected 'pos'"));
    }

    SECTION("one bad statement does not hide later diagnostics") {
        const dsl::ParseResult r =
            dsl::parse_circuit("step 1 { flip }\nstep 3 { shift }");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "unknown statement keyword 'flip'"));
        REQUIRE(has_error_containing(r, "expected 2, found 3"));
    }
}

TEST_CASE("statement order is normalized with a warning", "[dsl]") {
    const dsl::ParseResult r =
        dsl::parse_circuit("step 1 {\n    shift\n    coin line2 HWP 45\n}");
    REQUIRE(r.ok());
    REQUIRE(r.has_warnings());
    bool found = false;
    for (const dsl::CompileDiagnostic& d : r.diagnostics)
        if (d.severity == dsl::Severity::Warning &&
            d.message.find("normalized order") != std::string::npos)
            found = true;
    REQUIRE(found);

    Circuit want;
    StepDescriptor s;
    s.coin_line2 = CoinOperator::hwp(45.0);
    s.do_shift = true;
    want.steps.push_back(s);
    REQUIRE(circuit_difference(*r.circuit, want) == 0.0);
}

TEST_CASE("the grammar shrugs off comments, whitespace, and glued punctuation", "[dsl]") {
    const char* src =
        "# leading comment\n"
        "step 1 { coin line2 I coin line3 HWP 45 shift exchange pos=-1 } # trailing\n";
    const dsl::ParseResult r = dsl::parse_circuit(src);
    REQUIRE(r.ok());
    REQUIRE_FALSE(r.has_warnings());
    REQUIRE(r.circuit->steps.size() == 1);
    REQUIRE(r.circuit->steps[0].exchange == ExchangeRule{-1});
    REQUIRE(r.circuit->steps[0].do_shift);
}

TEST_CASE("a step may omit the shift", "[dsl]") {
    const dsl::ParseResult r = dsl::parse_circuit("step 1 { coin line2 HWP 10 }");
    REQUIRE(r.ok());
    REQUIRE_FALSE(r.circuit->steps[0].do_shift);
}

TEST_CASE("circuit files are loaded and missing ones reported", "[dsl]") {
    SECTION("a missing file is an error without a source location") {
        const dsl::ParseResult r = dsl::parse_circuit_file("/nonexistent/qwswap.qwc");
        REQUIRE_FALSE(r.ok());
        REQUIRE(has_error_containing(r, "cannot open circuit file"));
        REQUIRE(r.diagnostics.at(0).line == 0);
        REQUIRE(r.diagnostics.at(0).to_string().find("error: cannot open") == 0);
    }

    SECTION("a file round-trips like an in-memory source") {
        const std::string path = "/tmp/qwswap_dsl_roundtrip.qwc";
        {
            std::ofstream out(path);
            out << dsl::builtin_protocol_source();
        }
        const dsl::ParseResult r = dsl::parse_circuit_file(path);
        REQUIRE(r.ok());
        REQUIRE(circuit_difference(*r.circuit, build_protocol_circuit()) == 0.0);
        std::remove(path.c_str());
    }
}

TEST_CASE("fuzzed circuits survive print-parse round trips", "[dsl]") {
    std::mt19937_64 rng(0xD51u);
    for (int trial = 0; trial < 20; ++trial) {
        const Circuit original = random_expressible_circuit(rng);
        const std::string text = dsl::pretty_print(original);

        INFO("trial " << trial << "\n" << text);
        const dsl::ParseResult parsed = dsl::parse_circuit(text);
        REQUIRE(parsed.ok());
        REQUIRE(parsed.diagnostics.empty());

        const auto diff = circuit_difference(original, *parsed.circuit);
        REQUIRE(diff.has_value());
        REQUIRE(*diff == 0.0);
        REQUIRE(dsl::pretty_print(*parsed.circuit) == text);
    }
}
