#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "certdel/common.hpp"
#include "certdel/qubit.hpp"
#include "certdel/rng.hpp"

namespace certdel {

inline constexpr double kDenseTolerance = 1e-9;
inline constexpr std::size_t kDefaultDenseCap = 20;

// Labeled partition of {0,1}^n for projective subset measurements. Strings
// are encoded as integers with qubit 0 in the most significant position,
// matching BitString::to_uint.
struct StringPartition {
    std::vector<std::vector<std::uint32_t>> subsets;
};

// Full 2^n statevector for coherent multi-qubit measurements. Qubit count is
// capped (default 20, ~16 MiB of amplitudes); the product-form register is
// the normal representation and this one exists for joint measurements that
// do not factorize.
class DenseState {
public:
    DenseState(std::size_t num_qubits, std::vector<Complex> amplitudes)
        : n_(num_qubits), amp_(std::move(amplitudes)) {
        if (amp_.size() != (std::size_t{1} << n_))
            throw LengthMismatch("DenseState: amplitude count is not 2^n");
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t dimension() const { return amp_.size(); }
    const std::vector<Complex>& amplitudes() const { return amp_; }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : amp_) s += std::norm(a);
        return s;
    }

    // Applies the 2x2 matrix [[m00, m01], [m10, m11]] to qubit `index`.
    void apply_single_qubit(std::size_t index, Complex m00, Complex m01, Complex m10, Complex m11) {
        const std::size_t stride = bit_mask(index);
        for (std::size_t s = 0; s < amp_.size(); ++s) {
            if (s & stride) continue;
            const Complex a0 = amp_[s];
            const Complex a1 = amp_[s | stride];
            amp_[s] = m00 * a0 + m01 * a1;
            amp_[s | stride] = m10 * a0 + m11 * a1;
        }
    }

    // Rewrites amplitudes into the label space of `basis` applied to every
    // qubit: afterwards, index bit b means "basis state b of that qubit".
    void rotate_to_basis_labels(const Basis& basis) {
        const Qubit u0 = basis_state(basis, 0);
        const Qubit u1 = basis_state(basis, 1);
        for (std::size_t i = 0; i < n_; ++i)
            apply_single_qubit(i, std::conj(u0.amp0), std::conj(u0.amp1), std::conj(u1.amp0),
                               std::conj(u1.amp1));
    }

    // Inverse of rotate_to_basis_labels.
    void rotate_from_basis_labels(const Basis& basis) {
        const Qubit u0 = basis_state(basis, 0);
        const Qubit u1 = basis_state(basis, 1);
        for (std::size_t i = 0; i < n_; ++i)
            apply_single_qubit(i, u0.amp0, u1.amp0, u0.amp1, u1.amp1);
    }

    void renormalize() {
        const double norm = std::sqrt(norm_sq());
        if (norm == 0.0) throw EmptyOutcome("DenseState: renormalizing a zero state");
        for (auto& a : amp_) a /= norm;
    }

private:
    std::size_t bit_mask(std::size_t qubit_index) const {
        return std::size_t{1} << (n_ - 1 - qubit_index);
    }

    friend int dense_measure_qubit(DenseState&, std::size_t, const Basis&, Rng&);

    std::size_t n_;
    std::vector<Complex> amp_;
};

// Expands a product register into dense form; amplitude of string s is the
// product over qubits of the chosen component.
inline DenseState to_dense(const ProductRegister& reg, std::size_t cap = kDefaultDenseCap) {
    if (reg.size() > cap) throw RegisterTooLarge("to_dense: register exceeds dense qubit cap");
    if (reg.any_consumed()) throw AlreadyConsumed("to_dense: register has consumed qubits");
    std::vector<Complex> amp(std::size_t{1} << reg.size());
    const std::size_t n = reg.size();
    for (std::size_t s = 0; s < amp.size(); ++s) {
        Complex a(1.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const bool one = (s >> (n - 1 - i)) & 1;
            const Qubit& q = reg.qubit(i);
            a *= one ? q.amp1 : q.amp0;
        }
        amp[s] = a;
    }
    return DenseState(n, std::move(amp));
}

// Two-outcome projective measurement of one qubit in an arbitrary basis;
// collapses in place and returns the outcome bit.
inline int dense_measure_qubit(DenseState& d, std::size_t index, const Basis& basis, Rng& rng) {
    if (index >= d.num_qubits()) throw DomainError("dense_measure_qubit: index out of range");
    const Qubit u0 = basis_state(basis, 0);
    const Qubit u1 = basis_state(basis, 1);
    const std::size_t stride = d.bit_mask(index);

    double p0 = 0.0;
    for (std::size_t s = 0; s < d.amp_.size(); ++s) {
        if (s & stride) continue;
        const Complex c0 = std::conj(u0.amp0) * d.amp_[s] + std::conj(u0.amp1) * d.amp_[s | stride];
        p0 += std::norm(c0);
    }
    const double total = d.norm_sq();
    const int bit = rng.uniform() * total < p0 ? 0 : 1;
    const Qubit& u = bit ? u1 : u0;

    for (std::size_t s = 0; s < d.amp_.size(); ++s) {
        if (s & stride) continue;
        const Complex c = std::conj(u.amp0) * d.amp_[s] + std::conj(u.amp1) * d.amp_[s | stride];
        d.amp_[s] = c * u.amp0;
        d.amp_[s | stride] = c * u.amp1;
    }
    d.renormalize();
    return bit;
}

// Projects onto one subset of a labeled partition of the computational
// string space: subset label sampled by total amplitude mass, state
// restricted to the subset and renormalized. With validate set, the subsets
// must tile {0,1}^n exactly.
inline std::size_t dense_project_onto_strings(DenseState& d, const StringPartition& partition,
                                              Rng& rng, bool validate = false) {
    const std::size_t dim = d.dimension();
    if (validate) {
        std::vector<std::uint8_t> seen(dim, 0);
        for (const auto& subset : partition.subsets)
            for (auto s : subset) {
                if (s >= dim || seen[s]) throw PartitionInvalid("partition is not disjoint over {0,1}^n");
                seen[s] = 1;
            }
        for (auto flag : seen)
            if (!flag) throw PartitionInvalid("partition does not cover {0,1}^n");
    }

    const auto& amp = d.amplitudes();
    std::vector<double> mass(partition.subsets.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < partition.subsets.size(); ++k) {
        for (auto s : partition.subsets[k]) mass[k] += std::norm(amp[s]);
        total += mass[k];
    }

    const double draw = rng.uniform() * total;
    double acc = 0.0;
    std::size_t label = partition.subsets.size() - 1;
    for (std::size_t k = 0; k < partition.subsets.size(); ++k) {
        acc += mass[k];
        if (draw < acc) {
            label = k;
            break;
        }
    }
    if (mass[label] <= 0.0) throw EmptyOutcome("dense_project_onto_strings: sampled subset has zero mass");

    std::vector<Complex> restricted(dim, Complex(0.0, 0.0));
    for (auto s : partition.subsets[label]) restricted[s] = amp[s];
    d = DenseState(d.num_qubits(), std::move(restricted));
    d.renormalize();
    return label;
}

} // namespace certdel
