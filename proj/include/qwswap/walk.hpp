#pragma once

// Discrete-time walk machinery: polarization coins, the polarization-
// conditioned shift, the mid-lattice path exchange, and phase retarders,
// composed into steps. Every one of these elements is a one-photon unitary,
// so a single lifting mechanism applies them to one-photon states, ordered
// two-photon states (slot by slot) and symmetrized two-photon states (with
// bosonic double-occupation bookkeeping).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qwswap/core.hpp"

namespace qwswap {

// 2x2 polarization coin, checked unitary at construction. Coins realized by a
// half-wave plate remember their plate angle so alignment jitter can rebuild
// them; the identity coin (an empty slot in the apparatus) has no angle.
class CoinOperator {
  public:
    using Matrix = std::array<std::array<Amplitude, 2>, 2>;

    static CoinOperator from_matrix(const Matrix& m, std::optional<double> hwp_deg = {}) {
        CoinOperator c;
        c.m_ = m;
        c.hwp_angle_deg_ = hwp_deg;
        c.check_unitary();
        return c;
    }

    // HWP(theta): [[cos 2t, sin 2t], [sin 2t, -cos 2t]], theta in degrees.
    static CoinOperator hwp(double angle_deg) {
        double t = 2.0 * angle_deg * std::numbers::pi / 180.0;
        Matrix m{{{Amplitude{std::cos(t), 0.0}, Amplitude{std::sin(t), 0.0}},
                  {Amplitude{std::sin(t), 0.0}, Amplitude{-std::cos(t), 0.0}}}};
        return from_matrix(m, angle_deg);
    }

    static CoinOperator identity() {
        return from_matrix(Matrix{{{Amplitude{1.0, 0.0}, Amplitude{0.0, 0.0}},
                                   {Amplitude{0.0, 0.0}, Amplitude{1.0, 0.0}}}});
    }

    // Polarization flip, the 45 degree plate. Defined through hwp() so a coin
    // rebuilt from its printed angle is bitwise identical to this one.
    static CoinOperator not_gate() { return hwp(45.0); }

    // Balanced polarization mixer, the 22.5 degree plate. Defined through
    // hwp() for the same bitwise round-trip guarantee as not_gate().
    static CoinOperator hadamard() { return hwp(22.5); }

    const Matrix& matrix() const { return m_; }
    Amplitude element(Polarization row, Polarization col) const {
        return m_[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    }
    std::optional<double> hwp_angle_deg() const { return hwp_angle_deg_; }

    bool is_identity(double atol = kDefaultTolerance) const {
        return std::abs(m_[0][0] - 1.0) < atol && std::abs(m_[1][1] - 1.0) < atol &&
               std::abs(m_[0][1]) < atol && std::abs(m_[1][0]) < atol;
    }

    double max_difference(const CoinOperator& other) const {
        double d = 0.0;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) d = std::max(d, std::abs(m_[r][c] - other.m_[r][c]));
        return d;
    }

  private:
    void check_unitary() const {
        // U^dagger U == I within 1e-12.
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                Amplitude e{0.0, 0.0};
                for (int k = 0; k < 2; ++k) e += std::conj(m_[k][i]) * m_[k][j];
                Amplitude want = (i == j) ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0};
                if (std::abs(e - want) > 1e-12)
                    throw std::invalid_argument("coin operator is not unitary");
            }
        }
        for (const auto& row : m_)
            for (const auto& e : row)
                if (!is_finite(e)) throw std::invalid_argument("coin operator is not unitary");
    }

    Matrix m_{};
    std::optional<double> hwp_angle_deg_;
};

// The fixed polarization-conditioned displacement: H moves up, V moves down.
struct ShiftRule {
    static constexpr int displacement(Polarization p) { return p == Polarization::H ? +1 : -1; }
};

// Swaps the two lines' modes at one position. Self-inverse by construction.
struct ExchangeRule {
    int position = -1;

    friend bool operator==(const ExchangeRule&, const ExchangeRule&) = default;
};

// e^{i phase} on whatever occupies (line, position).
struct PhaseRetarder {
    Line line = Line::Line2;
    int position = 0;
    double phase = 0.0;

    friend bool operator==(const PhaseRetarder&, const PhaseRetarder&) = default;
};

// One protocol step, applied in the fixed order: retarders, coins, shift,
// exchange. Coins are line-conditioned; a photon that crossed lines in an
// earlier exchange sees the coin of the line it currently occupies.
struct StepDescriptor {
    CoinOperator coin_line2 = CoinOperator::identity();
    CoinOperator coin_line3 = CoinOperator::identity();
    std::vector<PhaseRetarder> retarders;
    bool do_shift = true;
    std::optional<ExchangeRule> exchange;
};

struct Circuit {
    std::vector<StepDescriptor> steps;

    // Walker positions can never leave [-bound, bound]; exceeding it is a
    // hard error, not a silent truncation.
    int lattice_bound() const { return 2 * static_cast<int>(steps.size()); }
};

// Largest numeric deviation between two circuits of the same shape (coin
// entries and retarder phases), or nullopt when they differ structurally:
// step count, shift or exchange layout, or retarder placement.
inline std::optional<double> circuit_difference(const Circuit& x, const Circuit& y) {
    if (x.steps.size() != y.steps.size()) return std::nullopt;
    double worst = 0.0;
    for (std::size_t i = 0; i < x.steps.size(); ++i) {
        const StepDescriptor& s = x.steps[i];
        const StepDescriptor& t = y.steps[i];
        if (s.do_shift != t.do_shift || s.exchange != t.exchange) return std::nullopt;
        if (s.retarders.size() != t.retarders.size()) return std::nullopt;
        for (std::size_t r = 0; r < s.retarders.size(); ++r) {
            if (s.retarders[r].line != t.retarders[r].line ||
                s.retarders[r].position != t.retarders[r].position)
                return std::nullopt;
            worst = std::max(worst, std::abs(s.retarders[r].phase - t.retarders[r].phase));
        }
        worst = std::max(worst, s.coin_line2.max_difference(t.coin_line2));
        worst = std::max(worst, s.coin_line3.max_difference(t.coin_line3));
    }
    return worst;
}

namespace detail {

// A one-photon linear map: ket -> list of (ket, amplitude). Coins emit two
// terms, everything else one.
using PhotonImage = std::vector<std::pair<PhotonBasisKet, Amplitude>>;

template <class F>
OnePhotonState lift_one(const OnePhotonState& s, F&& f) {
    OnePhotonState out(s.tolerance());
    for (const auto& [k, a] : s.terms())
        for (const auto& [k2, w] : f(k)) out.add(k2, a * w);
    return out.pruned();
}

template <class F>
OrderedState lift_ordered_slot(const OrderedState& s, F&& f, int slot) {
    OrderedState out(s.tolerance());
    for (const auto& [k, a] : s.terms()) {
        const PhotonBasisKet& target = slot == 0 ? k.first : k.second;
        for (const auto& [k2, w] : f(target)) {
            OrderedPairKet nk = k;
            (slot == 0 ? nk.first : nk.second) = k2;
            out.add(nk, a * w);
        }
    }
    return out.pruned();
}

// U (x) U on labeled photons factorizes into two slot applications.
template <class F>
OrderedState lift_ordered(const OrderedState& s, F&& f) {
    return lift_ordered_slot(lift_ordered_slot(s, f, 0), f, 1);
}

// Bosonic lift: write each multiset ket through creation operators,
//   |{x,y}> = a*_x a*_y |0>            for x != y,
//   |{x,x}> = a*_x a*_x |0> / sqrt(2),
// push the map through a*_m -> sum_m' U_{m'm} a*_m', and collect unordered
// pairs again. Same-mode double occupations pick up the usual sqrt(2); this
// is what makes two photons bunch or cancel instead of acting like labels.
template <class F>
SymmetrizedState lift_symmetrized(const SymmetrizedState& s, F&& f) {
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    std::map<SymmetrizedKet, Amplitude> creation;
    for (const auto& [k, a] : s.terms()) {
        Amplitude w = a * (k.doubly_occupied() ? inv_sqrt2 : 1.0);
        PhotonImage ia = f(k.lo);
        PhotonImage ib = f(k.hi);
        for (const auto& [p, ca] : ia)
            for (const auto& [q, cb] : ib) creation[SymmetrizedKet(p, q)] += w * ca * cb;
    }
    SymmetrizedState out(s.tolerance());
    for (const auto& [k, c] : creation)
        out.add(k, c * (k.doubly_occupied() ? std::numbers::sqrt2 : 1.0));
    return out.pruned();
}

// Dispatch on the state flavour so the operations below are written once.
template <class F>
OnePhotonState lift(const OnePhotonState& s, F&& f) {
    return lift_one(s, std::forward<F>(f));
}
template <class F>
OrderedState lift(const OrderedState& s, F&& f) {
    return lift_ordered(s, std::forward<F>(f));
}
template <class F>
SymmetrizedState lift(const SymmetrizedState& s, F&& f) {
    return lift_symmetrized(s, std::forward<F>(f));
}

}  // namespace detail

// Applies the coin to every photon currently on `line`; photons on the other
// line are untouched.
template <class State>
State apply_coin(const State& s, Line line, const CoinOperator& coin) {
    return detail::lift(s, [&](const PhotonBasisKet& k) {
        detail::PhotonImage img;
        if (k.mode.line != line) {
            img.emplace_back(k, Amplitude{1.0, 0.0});
            return img;
        }
        for (Polarization row : {Polarization::H, Polarization::V}) {
            Amplitude w = coin.element(row, k.pol);
            if (std::abs(w) > 0.0) img.emplace_back(PhotonBasisKet{row, k.mode}, w);
        }
        return img;
    });
}

// Coin applied to photons on both lines, for single-walker runs where the
// line plays no role.
template <class State>
State apply_coin_everywhere(const State& s, const CoinOperator& coin) {
    return apply_coin(apply_coin(s, Line::Line2, coin), Line::Line3, coin);
}

template <class State>
State apply_shift(const State& s, int lattice_bound) {
    return detail::lift(s, [&](const PhotonBasisKet& k) {
        PhotonBasisKet nk = k;
        nk.mode.position += ShiftRule::displacement(k.pol);
        if (std::abs(nk.mode.position) > lattice_bound)
            throw std::runtime_error("lattice bound exceeded");
        return detail::PhotonImage{{nk, Amplitude{1.0, 0.0}}};
    });
}

template <class State>
State apply_exchange(const State& s, const ExchangeRule& rule) {
    return detail::lift(s, [&](const PhotonBasisKet& k) {
        PhotonBasisKet nk = k;
        if (k.mode.position == rule.position) nk.mode.line = other_line(k.mode.line);
        return detail::PhotonImage{{nk, Amplitude{1.0, 0.0}}};
    });
}

template <class State>
State apply_retarder(const State& s, const PhaseRetarder& r) {
    const Amplitude phase = std::polar(1.0, r.phase);
    return detail::lift(s, [&](const PhotonBasisKet& k) {
        Amplitude w = (k.mode.line == r.line && k.mode.position == r.position)
                          ? phase
                          : Amplitude{1.0, 0.0};
        return detail::PhotonImage{{k, w}};
    });
}

// One full step: retarders, then the two line coins, then the shift, then the
// exchange when present.
template <class State>
State run_step(const State& s, const StepDescriptor& step, int lattice_bound) {
    State cur = s;
    for (const auto& r : step.retarders) cur = apply_retarder(cur, r);
    cur = apply_coin(cur, Line::Line2, step.coin_line2);
    cur = apply_coin(cur, Line::Line3, step.coin_line3);
    if (step.do_shift) cur = apply_shift(cur, lattice_bound);
    if (step.exchange) cur = apply_exchange(cur, *step.exchange);
    return cur;
}

// t applications of U = S (C (x) I) to a single walker. The walker's line is
// inert here; the coin acts wherever the photon is.
inline OnePhotonState run_single_walker(const OnePhotonState& initial, const CoinOperator& coin,
                                        int steps) {
    if (steps < 0) throw std::invalid_argument("negative step count");
    int bound = 2 * std::max(steps, 1);
    OnePhotonState cur = initial;
    for (int t = 0; t < steps; ++t) {
        cur = apply_coin_everywhere(cur, coin);
        cur = apply_shift(cur, bound);
    }
    return cur;
}

// Position marginal of a one-photon state, polarization traced out.
inline std::map<int, double> position_distribution(const OnePhotonState& s) {
    std::map<int, double> out;
    for (const auto& [k, a] : s.terms()) out[k.mode.position] += std::norm(a);
    return out;
}

}  // namespace qwswap
