#pragma once

// Text format for walk circuits (conventionally stored in .qwc files).
//
//   circuit  := step+
//   step     := "step" INT "{" stmt* "}"
//   stmt     := coin | retarder | shift | exchange
//   coin     := "coin" ("line2" | "line3") ("I" | "HWP" ANGLE_DEGREES)
//   retarder := "pr" ("line2" | "line3") POSITION PHASE_RADIANS
//   shift    := "shift"
//   exchange := "exchange" "pos" "=" POSITION
//
// "#" starts a comment running to the end of the line. Step numbers must be
// consecutive starting at 1. Each step may name at most one coin per line,
// one shift, and one exchange. Statement order inside a step is normalized to
// retarders, coins, shift, exchange; sources listing them in another order
// parse fine but earn a warning, since the simulation always applies the
// normalized order.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qwswap/core.hpp"
#include "qwswap/walk.hpp"

namespace qwswap::dsl {

enum class Severity { Error, Warning };

struct CompileDiagnostic {
    Severity severity = Severity::Error;
    std::string message;
    int line = 0;  // 1-based; 0 when no source location applies
    int column = 0;

    std::string to_string() const {
        std::string head = severity == Severity::Error ? "error" : "warning";
        if (line > 0) head += " at " + std::to_string(line) + ":" + std::to_string(column);
        return head + ": " + message;
    }
};

struct ParseResult {
    std::optional<Circuit> circuit;  // set iff no errors were reported
    std::vector<CompileDiagnostic> diagnostics;

    bool ok() const { return circuit.has_value(); }

    bool has_warnings() const {
        return std::any_of(diagnostics.begin(), diagnostics.end(),
                           [](const CompileDiagnostic& d) { return d.severity == Severity::Warning; });
    }
};

namespace detail {

struct Token {
    std::string text;
    int line = 1;
    int column = 1;
};

inline bool is_punct(char c) { return c == '{' || c == '}' || c == '='; }

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1;
    int column = 1;
    std::size_t i = 0;
    auto bump = [&](char c) {
        if (c == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') {
                bump(src[i]);
                ++i;
            }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            bump(c);
            ++i;
            continue;
        }
        if (is_punct(c)) {
            out.push_back(Token{std::string(1, c), line, column});
            bump(c);
            ++i;
            continue;
        }
        const int tok_line = line;
        const int tok_column = column;
        std::string text;
        while (i < src.size()) {
            const char d = src[i];
            if (std::isspace(static_cast<unsigned char>(d)) || is_punct(d) || d == '#') break;
            text += d;
            bump(d);
            ++i;
        }
        out.push_back(Token{std::move(text), tok_line, tok_column});
    }
    return out;
}

// Statement kinds in canonical order; parse_statement reports which kind it
// consumed so the step parser can detect out-of-order sources.
enum : int { kStmtRetarder = 0, kStmtCoin = 1, kStmtShift = 2, kStmtExchange = 3, kStmtError = -1 };

class Parser {
  public:
    explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

    ParseResult run() {
        Circuit circuit;
        int expected_step = 1;
        while (!at_end()) {
            if (!parse_step(circuit, expected_step)) break;
        }
        if (circuit.steps.empty() && !has_error())
            diags_.push_back({Severity::Error, "circuit must contain at least one step", 1, 1});
        ParseResult result;
        const bool failed = has_error();
        result.diagnostics = std::move(diags_);
        if (!failed) result.circuit = std::move(circuit);
        return result;
    }

  private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<CompileDiagnostic> diags_;

    bool at_end() const { return pos_ >= tokens_.size(); }
    const Token& peek() const { return tokens_[pos_]; }
    Token advance() { return tokens_[pos_++]; }

    Token last_token() const { return tokens_.empty() ? Token{} : tokens_.back(); }

    void error(const std::string& msg, const Token& t) {
        diags_.push_back({Severity::Error, msg, t.line, t.column});
    }

    void warn(const std::string& msg, const Token& t) {
        diags_.push_back({Severity::Warning, msg, t.line, t.column});
    }

    bool has_error() const {
        return std::any_of(diags_.begin(), diags_.end(), [](const CompileDiagnostic& d) {
            return d.severity == Severity::Error;
        });
    }

    std::optional<Token> take_or(const char* what) {
        if (at_end()) {
            error(std::string("expected ") + what + " before end of input", last_token());
            return std::nullopt;
        }
        return tokens_[pos_++];
    }

    bool expect(const char* text, const char* what) {
        if (at_end()) {
            error(std::string("expected ") + what + " before end of input", last_token());
            return false;
        }
        if (peek().text != text) {
            error(std::string("expected ") + what + ", found '" + peek().text + "'", peek());
            return false;
        }
        ++pos_;
        return true;
    }

    std::optional<int> parse_int(const Token& t) {
        int v = 0;
        const char* begin = t.text.data();
        const char* end = begin + t.text.size();
        auto [p, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{} || p != end) {
            error("expected an integer, found '" + t.text + "'", t);
            return std::nullopt;
        }
        return v;
    }

    std::optional<double> parse_double(const Token& t) {
        double v = 0.0;
        const char* begin = t.text.data();
        const char* end = begin + t.text.size();
        auto [p, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{} || p != end || !std::isfinite(v)) {
            error("expected a finite number, found '" + t.text + "'", t);
            return std::nullopt;
        }
        return v;
    }

    std::optional<Line> parse_line_name() {
        const auto t = take_or("a line name");
        if (!t) return std::nullopt;
        if (t->text == "line2") return Line::Line2;
        if (t->text == "line3") return Line::Line3;
        error("unknown line '" + t->text + "' (expected line2 or line3)", *t);
        return std::nullopt;
    }

    // Skips to the next plausible statement start so one bad statement does
    // not swallow the diagnostics of the rest of the file.
    bool recover_statement() {
        while (!at_end()) {
            const std::string& t = peek().text;
            if (t == "}" || t == "step" || t == "pr" || t == "coin" || t == "shift" ||
                t == "exchange")
                return true;
            ++pos_;
        }
        return false;
    }

    int parse_statement(StepDescriptor& step, bool& has_coin2, bool& has_coin3, bool& has_shift) {
        const Token kw = advance();
        if (kw.text == "pr") {
            const auto line = parse_line_name();
            if (!line) return kStmtError;
            const auto pos_tok = take_or("a lattice position");
            if (!pos_tok) return kStmtError;
            const auto position = parse_int(*pos_tok);
            if (!position) return kStmtError;
            const auto phase_tok = take_or("a phase in radians");
            if (!phase_tok) return kStmtError;
            const auto phase = parse_double(*phase_tok);
            if (!phase) return kStmtError;
            step.retarders.push_back(PhaseRetarder{*line, *position, *phase});
            return kStmtRetarder;
        }
        if (kw.text == "coin") {
            const auto line = parse_line_name();
            if (!line) return kStmtError;
            const auto spec = take_or("a coin spec (I or HWP <angle>)");
            if (!spec) return kStmtError;
            CoinOperator coin = CoinOperator::identity();
            if (spec->text == "HWP") {
                const auto angle_tok = take_or("a waveplate angle in degrees");
                if (!angle_tok) return kStmtError;
                const auto angle = parse_double(*angle_tok);
                if (!angle) return kStmtError;
                coin = CoinOperator::hwp(*angle);
            } else if (spec->text != "I") {
                error("unknown coin '" + spec->text + "' (expected I or HWP <angle>)", *spec);
                return kStmtError;
            }
            bool& seen = *line == Line::Line2 ? has_coin2 : has_coin3;
            if (seen) {
                error("line" + std::to_string(line_label(*line)) +
                          " already has a coin in this step",
                      kw);
                return kStmtError;
            }
            seen = true;
            (*line == Line::Line2 ? step.coin_line2 : step.coin_line3) = coin;
            return kStmtCoin;
        }
        if (kw.text == "shift") {
            if (has_shift) {
                error("duplicate shift in this step", kw);
                return kStmtError;
            }
            has_shift = true;
            step.do_shift = true;
            return kStmtShift;
        }
        if (kw.text == "exchange") {
            if (step.exchange) {
                error("duplicate exchange in this step", kw);
                return kStmtError;
            }
            if (!expect("pos", "'pos'")) return kStmtError;
            if (!expect("=", "'='")) return kStmtError;
            const auto pos_tok = take_or("a lattice position");
            if (!pos_tok) return kStmtError;
            const auto position = parse_int(*pos_tok);
            if (!position) return kStmtError;
            step.exchange = ExchangeRule{*position};
            return kStmtExchange;
        }
        error("unknown statement keyword '" + kw.text + "'", kw);
        return kStmtError;
    }

    bool parse_step(Circuit& circuit, int& expected_step) {
        if (peek().text != "step") {
            error("expected 'step', found '" + peek().text + "'", peek());
            return false;
        }
        const Token step_kw = advance();
        const auto num_tok = take_or("a step number");
        if (!num_tok) return false;
        const auto num = parse_int(*num_tok);
        if (!num) return false;
        if (*num != expected_step)
            error("step numbers must be consecutive starting at 1 (expected " +
                      std::to_string(expected_step) + ", found " + std::to_string(*num) + ")",
                  *num_tok);
        ++expected_step;
        if (!expect("{", "'{'")) return false;

        StepDescriptor step;
        step.do_shift = false;
        bool has_coin2 = false;
        bool has_coin3 = false;
        bool has_shift = false;
        int last_kind = -1;
        bool out_of_order = false;
        while (true) {
            if (at_end()) {
                error("expected '}' before end of input", last_token());
                return false;
            }
            if (peek().text == "}") {
                advance();
                break;
            }
            if (peek().text == "step") {
                error("expected '}' before the next step", peek());
                break;
            }
            const int kind = parse_statement(step, has_coin2, has_coin3, has_shift);
            if (kind == kStmtError) {
                if (!recover_statement()) return false;
                continue;
            }
            if (kind < last_kind) out_of_order = true;
            last_kind = std::max(last_kind, kind);
        }
        if (out_of_order)
            warn("statements in step " + std::to_string(*num) +
                     " apply in the normalized order: retarders, coins, shift, exchange",
                 step_kw);
        circuit.steps.push_back(std::move(step));
        return true;
    }
};

inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

}  // namespace detail

inline ParseResult parse_circuit(std::string_view source) {
    detail::Parser parser(source);
    return parser.run();
}

inline ParseResult parse_circuit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back({Severity::Error, "cannot open circuit file '" + path + "'", 0, 0});
        return r;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_circuit(ss.str());
}

// Canonical text for a circuit. Identity coins print as I, waveplate-backed
// coins as HWP with their angle in shortest round-trip form; a coin built
// from a raw matrix has no textual spelling and is rejected. The output
// parses back to an equal circuit and is a fixed point of parse-then-print.
inline std::string pretty_print(const Circuit& circuit) {
    auto coin_text = [](const CoinOperator& coin) -> std::string {
        if (const auto angle = coin.hwp_angle_deg()) return "HWP " + detail::format_number(*angle);
        if (coin.is_identity()) return "I";
        throw std::invalid_argument("circuit contains a coin the text format cannot express");
    };
    std::string out;
    for (std::size_t i = 0; i < circuit.steps.size(); ++i) {
        const StepDescriptor& s = circuit.steps[i];
        out += "step " + std::to_string(i + 1) + " {\n";
        for (const PhaseRetarder& r : s.retarders)
            out += "    pr line" + std::to_string(line_label(r.line)) + " " +
                   std::to_string(r.position) + " " + detail::format_number(r.phase) + "\n";
        out += "    coin line2 " + coin_text(s.coin_line2) + "\n";
        out += "    coin line3 " + coin_text(s.coin_line3) + "\n";
        if (s.do_shift) out += "    shift\n";
        if (s.exchange)
            out += "    exchange pos = " + std::to_string(s.exchange->position) + "\n";
        out += "}\n";
    }
    return out;
}

// The reference three-step circuit in source form.
inline std::string builtin_protocol_source() {
    return "# Three-step two-line swap circuit.\n"
           "# Coin angles are waveplate angles in degrees, retarder phases are in\n"
           "# radians, positions are lattice sites.\n"
           "\n"
           "step 1 {\n"
           "    coin line2 I\n"
           "    coin line3 HWP 45\n"
           "    shift\n"
           "    exchange pos = -1\n"
           "}\n"
           "\n"
           "step 2 {\n"
           "    coin line2 HWP 45\n"
           "    coin line3 HWP 45\n"
           "    shift\n"
           "}\n"
           "\n"
           "step 3 {\n"
           "    coin line2 HWP 22.5\n"
           "    coin line3 HWP 22.5\n"
           "    shift\n"
           "}\n";
}

}  // namespace qwswap::dsl
