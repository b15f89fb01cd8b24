#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "certdel/common.hpp"
#include "certdel/rng.hpp"

namespace certdel {

using Complex = std::complex<double>;

inline constexpr double kQubitTolerance = 1e-12;

// A single-qubit preparation/measurement basis: computational {|0>,|1>},
// Hadamard {|+>,|->}, or an arbitrary Bloch basis General(theta, psi) with
// theta in (0,pi) and psi in (0,2pi). The three tags are distinct values:
// Hadamard is not identified with any General(theta, psi), even where the
// underlying vectors coincide.
class Basis {
public:
    enum class Kind { Computational, Hadamard, General };

    static Basis computational() { return Basis(Kind::Computational, 0.0, 0.0); }
    static Basis hadamard() { return Basis(Kind::Hadamard, 0.0, 0.0); }

    static Basis general(double theta, double psi) {
        if (!(theta > 0.0 && theta < std::numbers::pi))
            throw DomainError("Basis::general: theta outside (0, pi)");
        if (!(psi > 0.0 && psi < 2.0 * std::numbers::pi))
            throw DomainError("Basis::general: psi outside (0, 2 pi)");
        return Basis(Kind::General, theta, psi);
    }

    // Uniformly random Bloch basis, both angles open-interval uniform.
    static Basis random_bloch(Rng& rng) {
        return general(rng.uniform_open(std::numbers::pi), rng.uniform_open(2.0 * std::numbers::pi));
    }

    // Uniformly random choice between the two conjugate-coding bases.
    static Basis random_conjugate(Rng& rng) { return rng.bit() ? hadamard() : computational(); }

    Kind kind() const { return kind_; }
    double theta() const { return theta_; }
    double psi() const { return psi_; }

    bool operator==(const Basis&) const = default;

private:
    Basis(Kind kind, double theta, double psi) : kind_(kind), theta_(theta), psi_(psi) {}

    Kind kind_;
    double theta_;
    double psi_;
};

// A pure single-qubit state; |amp0|^2 + |amp1|^2 = 1 within 1e-12 after
// every constructor and every collapse.
struct Qubit {
    Complex amp0;
    Complex amp1;

    double norm_sq() const { return std::norm(amp0) + std::norm(amp1); }
};

// The two orthonormal states of `basis`, indexed by the classical bit they
// encode. For General(theta, psi):
//   bit 0 -> cos(theta/2)|0> + e^{i psi} sin(theta/2)|1>
//   bit 1 -> sin(theta/2)|0> - e^{i psi} cos(theta/2)|1>
// The Hadamard convention maps bit 1 to |+> and bit 0 to |->; the worked
// protocol examples in this repository depend on that labeling.
inline Qubit basis_state(const Basis& basis, int bit) {
    switch (basis.kind()) {
        case Basis::Kind::Computational:
            return bit ? Qubit{Complex(0.0, 0.0), Complex(1.0, 0.0)}
                       : Qubit{Complex(1.0, 0.0), Complex(0.0, 0.0)};
        case Basis::Kind::Hadamard: {
            const double r = std::numbers::sqrt2 / 2.0;
            return bit ? Qubit{Complex(r, 0.0), Complex(r, 0.0)}
                       : Qubit{Complex(r, 0.0), Complex(-r, 0.0)};
        }
        case Basis::Kind::General: {
            const double c = std::cos(basis.theta() / 2.0);
            const double s = std::sin(basis.theta() / 2.0);
            const Complex phase = std::polar(1.0, basis.psi());
            return bit ? Qubit{Complex(s, 0.0), -phase * c} : Qubit{Complex(c, 0.0), phase * s};
        }
    }
    throw DomainError("basis_state: unreachable");
}

inline Complex inner_product(const Qubit& a, const Qubit& b) {
    return std::conj(a.amp0) * b.amp0 + std::conj(a.amp1) * b.amp1;
}

// Born rule: probability that measuring `q` in `basis` yields `bit`.
inline double outcome_probability(const Qubit& q, const Basis& basis, int bit) {
    return std::norm(inner_product(basis_state(basis, bit), q));
}

struct MeasurementResult {
    int bit;
    Qubit collapsed;
};

// Projective measurement. The collapsed state is exactly basis_state(basis,
// bit); the pre-measurement amplitudes are dropped by the caller's contract.
inline MeasurementResult measure_qubit(const Qubit& q, const Basis& basis, Rng& rng) {
    const double p0 = outcome_probability(q, basis, 0);
    const int bit = rng.uniform() < p0 ? 0 : 1;
    return {bit, basis_state(basis, bit)};
}

// An ordered product of single qubits: the simulated quantum channel
// payload. Measurement replaces a slot with its collapsed eigenstate and
// marks it consumed; the original amplitudes are unrecoverable through the
// register afterwards. Remeasuring in the same basis repeats the outcome.
class ProductRegister {
public:
    ProductRegister() = default;

    explicit ProductRegister(std::vector<Qubit> qubits)
        : qubits_(std::move(qubits)), consumed_(qubits_.size(), 0) {}

    std::size_t size() const { return qubits_.size(); }

    const Qubit& qubit(std::size_t i) const { return qubits_.at(i); }
    bool consumed(std::size_t i) const { return consumed_.at(i) != 0; }

    bool any_consumed() const {
        for (auto c : consumed_)
            if (c) return true;
        return false;
    }

    int measure(std::size_t i, const Basis& basis, Rng& rng) {
        auto [bit, collapsed] = measure_qubit(qubits_.at(i), basis, rng);
        qubits_[i] = collapsed;
        consumed_[i] = 1;
        return bit;
    }

    // Restores a deserialized register including consumed flags.
    static ProductRegister restore(std::vector<Qubit> qubits, std::vector<std::uint8_t> consumed) {
        if (qubits.size() != consumed.size())
            throw LengthMismatch("ProductRegister::restore: flag count mismatch");
        ProductRegister r;
        r.qubits_ = std::move(qubits);
        r.consumed_ = std::move(consumed);
        return r;
    }

    const std::vector<std::uint8_t>& consumed_flags() const { return consumed_; }

    // Renders recognizable eigenstates as 0/1/+/- and anything else as '?'.
    std::string render() const {
        std::string out;
        out.reserve(size());
        for (const auto& q : qubits_) out.push_back(render_symbol(q));
        return out;
    }

private:
    static char render_symbol(const Qubit& q) {
        const double r = std::numbers::sqrt2 / 2.0;
        if (close(q.amp0, Complex(1, 0)) && close(q.amp1, Complex(0, 0))) return '0';
        if (close(q.amp0, Complex(0, 0)) && close(q.amp1, Complex(1, 0))) return '1';
        if (close(q.amp0, Complex(r, 0)) && close(q.amp1, Complex(r, 0))) return '+';
        if (close(q.amp0, Complex(r, 0)) && close(q.amp1, Complex(-r, 0))) return '-';
        return '?';
    }

    static bool close(const Complex& a, const Complex& b) { return std::abs(a - b) < 1e-9; }

    std::vector<Qubit> qubits_;
    std::vector<std::uint8_t> consumed_;
};

} // namespace certdel
