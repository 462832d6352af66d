#pragma once

// Two-photon statistics: conversion between the labeled and symmetrized
// representations, the regime split for the third step, and the detector
// model at the end of the walk.
//
// Synchronized means the photons' wave packets overlap wherever they occupy
// the same lattice mode, so the third step runs on the symmetrized
// representation and same-mode pairs interfere bosonically. Asynchronous
// means a relative arrival delay makes co-located photons distinguishable:
// exactly those terms keep their photon labels through step 3. For terms
// whose photons sit on different modes the delay changes nothing and the
// labels carry no physics, so their slot order is canonicalized; that keeps
// the two polarization components of a branch interfering per line, which is
// what pins the conclusive coincidences to cross-line detector pairs in both
// regimes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "qwswap/core.hpp"
#include "qwswap/walk.hpp"

namespace qwswap {

enum class Regime : std::uint8_t { Synchronized, Asynchronous };

inline const char* to_string(Regime r) {
    return r == Regime::Synchronized ? "synchronized" : "asynchronous";
}

// Ordered -> symmetrized conversion. When both slot orders of a pair carry
// amplitude the symmetric projection (a_xy + a_yx)/sqrt(2) applies; when a
// configuration is stored under a single order (the convention the protocol
// pipeline uses throughout) the amplitude transfers unchanged. Both cases
// preserve the norm of physically exchange-symmetric states; tests assert
// that instead of renormalizing here.
inline SymmetrizedState symmetrize(const OrderedState& s) {
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    SymmetrizedState out(s.tolerance());
    for (const auto& [k, a] : s.terms()) {
        if (k.first == k.second) {
            out.add(SymmetrizedKet(k.first, k.second), a);
            continue;
        }
        OrderedPairKet swapped{k.second, k.first};
        Amplitude partner = s.amplitude(swapped);
        if (std::abs(partner) >= s.tolerance()) {
            // Visit each unordered pair once, from its canonical order.
            if (k.canonical() == k) out.add(SymmetrizedKet(k.first, k.second), (a + partner) * inv_sqrt2);
        } else {
            out.add(SymmetrizedKet(k.first, k.second), a);
        }
    }
    return out.pruned();
}

// Either representation of a post-step-3 state. The synchronized pipeline
// produces the symmetrized flavour, the asynchronous one stays labeled.
using FinalState = std::variant<OrderedState, SymmetrizedState>;

inline bool photons_colocated(const OrderedPairKet& k) { return k.first.mode == k.second.mode; }

inline OrderedState evolve_asynchronous(const OrderedState& post_step2,
                                        const StepDescriptor& step3, int lattice_bound) {
    OrderedState prepared(post_step2.tolerance());
    for (const auto& [k, a] : post_step2.terms())
        prepared.add(photons_colocated(k) ? k : k.canonical(), a);
    return run_step(prepared.pruned(), step3, lattice_bound);
}

inline SymmetrizedState evolve_synchronized(const OrderedState& post_step2,
                                            const StepDescriptor& step3, int lattice_bound) {
    return run_step(symmetrize(post_step2), step3, lattice_bound);
}

inline FinalState evolve_regime(const OrderedState& post_step2, const StepDescriptor& step3,
                                Regime regime, int lattice_bound) {
    if (regime == Regime::Synchronized)
        return evolve_synchronized(post_step2, step3, lattice_bound);
    return evolve_asynchronous(post_step2, step3, lattice_bound);
}

// Symmetrized input variant: valid in the synchronized regime always, and in
// the asynchronous regime only when no term is doubly spatial-mode-occupied
// (there are no labels left to distinguish co-located photons by).
inline FinalState evolve_regime(const SymmetrizedState& post_step2, const StepDescriptor& step3,
                                Regime regime, int lattice_bound) {
    if (regime == Regime::Synchronized) return run_step(post_step2, step3, lattice_bound);
    OrderedState ordered(post_step2.tolerance());
    for (const auto& [k, a] : post_step2.terms()) {
        if (k.lo.mode == k.hi.mode)
            throw std::invalid_argument(
                "regime/representation mismatch: asynchronous evolution of co-located photons "
                "needs the labeled representation");
        ordered.add(OrderedPairKet{k.lo, k.hi}, a);
    }
    return run_step(ordered.pruned(), step3, lattice_bound);
}

// ---------------------------------------------------------------------------
// Detector plane

// Four bucket detectors at the ends of the two lines: D1/D2 catch line 2's
// +1/-1 ports, D3/D4 line 3's. Non-number-resolving: two photons in one port
// still make one click.
enum class DetectorId : std::uint8_t { D1 = 0, D2 = 1, D3 = 2, D4 = 3 };

inline Mode detector_mode(DetectorId d) {
    switch (d) {
        case DetectorId::D1: return Mode{Line::Line2, +1};
        case DetectorId::D2: return Mode{Line::Line2, -1};
        case DetectorId::D3: return Mode{Line::Line3, +1};
        default: return Mode{Line::Line3, -1};
    }
}

inline std::optional<DetectorId> detector_at(const Mode& m) {
    if (m.position == +1) return m.line == Line::Line2 ? DetectorId::D1 : DetectorId::D3;
    if (m.position == -1) return m.line == Line::Line2 ? DetectorId::D2 : DetectorId::D4;
    return std::nullopt;
}

// Set of detectors that clicked, as a 4-bit mask. Empty pattern = no clicks.
struct ClickPattern {
    std::uint8_t mask = 0;

    static ClickPattern of() { return {}; }
    static ClickPattern of(DetectorId d) {
        return ClickPattern{static_cast<std::uint8_t>(1u << static_cast<unsigned>(d))};
    }
    static ClickPattern of(DetectorId d1, DetectorId d2) {
        return ClickPattern{
            static_cast<std::uint8_t>(ClickPattern::of(d1).mask | ClickPattern::of(d2).mask)};
    }

    void add(DetectorId d) { mask |= ClickPattern::of(d).mask; }
    bool contains(DetectorId d) const { return mask & ClickPattern::of(d).mask; }

    int click_count() const {
        int n = 0;
        for (unsigned i = 0; i < 4; ++i)
            if (mask & (1u << i)) ++n;
        return n;
    }

    // True when exactly one detector on each line fired: the conclusive
    // coincidence class.
    bool cross_line_pair() const {
        bool l2 = contains(DetectorId::D1) || contains(DetectorId::D2);
        bool l3 = contains(DetectorId::D3) || contains(DetectorId::D4);
        return click_count() == 2 && l2 && l3;
    }

    std::string name() const {
        if (mask == 0) return "none";
        std::string s;
        for (unsigned i = 0; i < 4; ++i) {
            if (mask & (1u << i)) {
                if (!s.empty()) s += "+";
                s += "D" + std::to_string(i + 1);
            }
        }
        return s;
    }

    friend auto operator<=>(const ClickPattern&, const ClickPattern&) = default;
};

using ClickDistribution = std::map<ClickPattern, double>;

namespace detail {

template <class Key>
struct pair_modes;

template <>
struct pair_modes<OrderedPairKet> {
    static Mode a(const OrderedPairKet& k) { return k.first.mode; }
    static Mode b(const OrderedPairKet& k) { return k.second.mode; }
};

template <>
struct pair_modes<SymmetrizedKet> {
    static Mode a(const SymmetrizedKet& k) { return k.lo.mode; }
    static Mode b(const SymmetrizedKet& k) { return k.hi.mode; }
};

}  // namespace detail

// Detector pattern a single basis configuration produces: each photon sitting
// on a detector port contributes a click, photons elsewhere contribute none.
template <class Key>
ClickPattern click_pattern_of(const Key& k) {
    ClickPattern p;
    for (const Mode& m : {detail::pair_modes<Key>::a(k), detail::pair_modes<Key>::b(k)}) {
        if (auto d = detector_at(m)) p.add(*d);
    }
    return p;
}

// Largest per-pattern probability difference between two click
// distributions; patterns absent from one side count as probability zero.
inline double distribution_difference(const ClickDistribution& x, const ClickDistribution& y) {
    auto lookup = [](const ClickDistribution& d, const ClickPattern& k) {
        auto it = d.find(k);
        return it == d.end() ? 0.0 : it->second;
    };
    double worst = 0.0;
    for (const auto& [k, v] : x) worst = std::max(worst, std::abs(v - lookup(y, k)));
    for (const auto& [k, v] : y) worst = std::max(worst, std::abs(v - lookup(x, k)));
    return worst;
}

// Probability that at least one detector on the given line clicks.
inline double line_click_probability(const ClickDistribution& dist, Line line) {
    const DetectorId up = line == Line::Line2 ? DetectorId::D1 : DetectorId::D3;
    const DetectorId down = line == Line::Line2 ? DetectorId::D2 : DetectorId::D4;
    double p = 0.0;
    for (const auto& [pattern, prob] : dist)
        if (pattern.contains(up) || pattern.contains(down)) p += prob;
    return p;
}

// Click-pattern distribution of a final state, polarization marginalized.
// The strict flavour insists every photon landed on a detector port and is
// the right check for ideal circuits; the lenient flavour lets a photon miss
// the detector plane (jittered circuits put weight at |position| 3) and
// records no click for it.
template <class Key>
ClickDistribution detector_distribution_impl(const SparseState<Key>& final_state, bool strict) {
    ClickDistribution dist;
    for (const auto& [k, a] : final_state.terms()) {
        ClickPattern pattern;
        for (const Mode& m : {detail::pair_modes<Key>::a(k), detail::pair_modes<Key>::b(k)}) {
            auto d = detector_at(m);
            if (d)
                pattern.add(*d);
            else if (strict)
                throw std::domain_error("photon outside detector plane");
        }
        dist[pattern] += std::norm(a);
    }
    return dist;
}

template <class Key>
ClickDistribution detector_distribution(const SparseState<Key>& final_state) {
    return detector_distribution_impl(final_state, /*strict=*/true);
}

inline ClickDistribution detector_distribution(const FinalState& final_state) {
    return std::visit([](const auto& s) { return detector_distribution(s); }, final_state);
}

inline ClickDistribution detector_distribution_lenient(const FinalState& final_state) {
    return std::visit([](const auto& s) { return detector_distribution_impl(s, false); },
                      final_state);
}

}  // namespace qwswap
