#pragma once

// Sparse amplitude algebra for one- and two-photon walker states.
//
// A basis ket names a photon configuration: polarization plus a lattice mode
// (line, position). Two-photon states come in two flavours, an ordered pair
// (slot 0 = photon launched on line 2, slot 1 = photon launched on line 3)
// and a symmetrized pair (unordered multiset, used once the photons become
// indistinguishable). SparseState maps basis kets to complex amplitudes and
// is the common currency of every module above this one.

#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

namespace qwswap {

using Amplitude = std::complex<double>;

inline constexpr double kDefaultTolerance = 1e-12;

inline bool is_finite(const Amplitude& a) {
    return std::isfinite(a.real()) && std::isfinite(a.imag());
}

enum class Polarization : std::uint8_t { H = 0, V = 1 };

inline char pol_char(Polarization p) { return p == Polarization::H ? 'H' : 'V'; }

enum class Line : std::uint8_t { Line2 = 0, Line3 = 1 };

inline Line other_line(Line l) { return l == Line::Line2 ? Line::Line3 : Line::Line2; }

inline int line_label(Line l) { return l == Line::Line2 ? 2 : 3; }

// One lattice mode of the enlarged position space: which line the photon
// travels on and its integer walker position on that line.
struct Mode {
    Line line = Line::Line2;
    int position = 0;

    friend auto operator<=>(const Mode&, const Mode&) = default;
};

// Single-photon basis ket. Canonical order sorts by (line, position, pol) so
// that map iteration and symmetrized-pair normalization are deterministic.
struct PhotonBasisKet {
    Polarization pol = Polarization::H;
    Mode mode;

    auto sort_key() const { return std::make_tuple(mode.line, mode.position, pol); }

    friend bool operator==(const PhotonBasisKet&, const PhotonBasisKet&) = default;
    friend auto operator<=>(const PhotonBasisKet& a, const PhotonBasisKet& b) {
        return a.sort_key() <=> b.sort_key();
    }
};

inline PhotonBasisKet ket(Polarization p, Line l, int pos) {
    return PhotonBasisKet{p, Mode{l, pos}};
}

inline std::string to_string(const PhotonBasisKet& k) {
    return std::string(1, pol_char(k.pol)) + "@" + std::to_string(line_label(k.mode.line)) + ":" +
           (k.mode.position > 0 ? "+" : "") + std::to_string(k.mode.position);
}

// Ordered two-photon ket: slot 0 is the photon injected on line 2, slot 1 the
// photon injected on line 3. The slots are bookkeeping labels, not modes; a
// photon can wander onto the other line via the path exchange.
struct OrderedPairKet {
    PhotonBasisKet first;
    PhotonBasisKet second;

    friend bool operator==(const OrderedPairKet&, const OrderedPairKet&) = default;
    friend auto operator<=>(const OrderedPairKet& a, const OrderedPairKet& b) {
        if (auto c = a.first <=> b.first; c != 0) return c;
        return a.second <=> b.second;
    }

    // Slot order sorted by the canonical single-photon order. Used where the
    // labels carry no physical meaning.
    OrderedPairKet canonical() const {
        return second < first ? OrderedPairKet{second, first} : *this;
    }
};

inline std::string to_string(const OrderedPairKet& k) {
    return "[" + to_string(k.first) + " | " + to_string(k.second) + "]";
}

// Unordered two-photon ket for indistinguishable photons. Always stored with
// lo <= hi; lo == hi means both photons occupy the same full mode and the ket
// denotes the normalized two-photon occupation of it.
struct SymmetrizedKet {
    PhotonBasisKet lo;
    PhotonBasisKet hi;

    SymmetrizedKet() = default;
    SymmetrizedKet(const PhotonBasisKet& a, const PhotonBasisKet& b) : lo(a), hi(b) {
        if (hi < lo) std::swap(lo, hi);
    }

    bool doubly_occupied() const { return lo == hi; }

    friend bool operator==(const SymmetrizedKet&, const SymmetrizedKet&) = default;
    friend auto operator<=>(const SymmetrizedKet& a, const SymmetrizedKet& b) {
        if (auto c = a.lo <=> b.lo; c != 0) return c;
        return a.hi <=> b.hi;
    }
};

inline std::string to_string(const SymmetrizedKet& k) {
    return "{" + to_string(k.lo) + ", " + to_string(k.hi) + "}";
}

// Sparse ket-to-amplitude map with value semantics. Operations in this
// library never mutate their inputs; they return new states, pruned so that
// no stored amplitude has |amp| below the tolerance.
template <class Key>
class SparseState {
  public:
    using TermMap = std::map<Key, Amplitude>;

    SparseState() = default;
    explicit SparseState(double tolerance) : tolerance_(tolerance) {}

    double tolerance() const { return tolerance_; }

    const TermMap& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Amplitude amplitude(const Key& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? Amplitude{0.0, 0.0} : it->second;
    }

    // Accumulates into the term map. Rejects non-finite amplitudes at the
    // door; everything downstream may then assume finiteness.
    void add(const Key& k, const Amplitude& a) {
        if (!is_finite(a)) throw std::invalid_argument("non-finite amplitude");
        auto [it, inserted] = terms_.try_emplace(k, a);
        if (!inserted) it->second += a;
    }

    void set(const Key& k, const Amplitude& a) {
        if (!is_finite(a)) throw std::invalid_argument("non-finite amplitude");
        terms_[k] = a;
    }

    double norm_squared() const {
        double n = 0.0;
        for (const auto& [k, a] : terms_) n += std::norm(a);
        return n;
    }

    double norm() const { return std::sqrt(norm_squared()); }

    // Drops terms with |amp| < tolerance. Each pruned term changes the norm
    // by less than the tolerance, which tests rely on.
    SparseState& prune() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (std::abs(it->second) < tolerance_)
                it = terms_.erase(it);
            else
                ++it;
        }
        return *this;
    }

    SparseState pruned() const {
        SparseState s = *this;
        s.prune();
        return s;
    }

  private:
    TermMap terms_;
    double tolerance_ = kDefaultTolerance;
};

using OnePhotonState = SparseState<PhotonBasisKet>;
using OrderedState = SparseState<OrderedPairKet>;
using SymmetrizedState = SparseState<SymmetrizedKet>;

template <class Key>
SparseState<Key> scaled(const SparseState<Key>& s, const Amplitude& factor) {
    SparseState<Key> out(s.tolerance());
    for (const auto& [k, a] : s.terms()) out.add(k, a * factor);
    return out.pruned();
}

template <class Key>
SparseState<Key> sum(const SparseState<Key>& s1, const SparseState<Key>& s2) {
    SparseState<Key> out = s1;
    for (const auto& [k, a] : s2.terms()) out.add(k, a);
    return out.pruned();
}

// <s1|s2>, conjugate-linear in the first argument. Mixing basis arities is a
// type error: states over different ket types do not instantiate.
template <class Key>
Amplitude inner_product(const SparseState<Key>& s1, const SparseState<Key>& s2) {
    const auto& small = s1.size() <= s2.size() ? s1 : s2;
    const auto& large = s1.size() <= s2.size() ? s2 : s1;
    Amplitude acc{0.0, 0.0};
    for (const auto& [k, a] : small.terms()) {
        Amplitude b = large.amplitude(k);
        if (&small == &s1)
            acc += std::conj(a) * b;
        else
            acc += std::conj(b) * a;
    }
    return acc;
}

template <class Key>
SparseState<Key> normalize(const SparseState<Key>& s) {
    double n = s.norm();
    if (n < s.tolerance()) throw std::invalid_argument("cannot normalize null state");
    return scaled(s, Amplitude{1.0 / n, 0.0});
}

// Largest |amp| difference between two states, optionally after aligning the
// global phase on the largest term of s1. The verification report shows this
// number; states_equal thresholds it.
template <class Key>
double max_amplitude_error(const SparseState<Key>& s1, const SparseState<Key>& s2,
                           bool up_to_global_phase = false) {
    Amplitude phase{1.0, 0.0};
    if (up_to_global_phase && !s1.empty()) {
        const Key* pivot = nullptr;
        double best = -1.0;
        for (const auto& [k, a] : s1.terms()) {
            if (std::abs(a) > best) {
                best = std::abs(a);
                pivot = &k;
            }
        }
        Amplitude a1 = s1.amplitude(*pivot);
        Amplitude a2 = s2.amplitude(*pivot);
        if (std::abs(a2) > 0.0 && std::abs(a1) > 0.0) phase = (a2 / a1) / std::abs(a2 / a1);
    }
    double max_diff = 0.0;
    for (const auto& [k, a] : s1.terms())
        max_diff = std::max(max_diff, std::abs(a * phase - s2.amplitude(k)));
    for (const auto& [k, a] : s2.terms())
        max_diff = std::max(max_diff, std::abs(s1.amplitude(k) * phase - a));
    return max_diff;
}

template <class Key>
bool states_equal(const SparseState<Key>& s1, const SparseState<Key>& s2, double atol,
                  bool up_to_global_phase = false) {
    return max_amplitude_error(s1, s2, up_to_global_phase) < atol;
}

}  // namespace qwswap
