// qstate.hpp
// Dense statevector simulator restricted to the gate families used by
// forrelation circuits: a Hadamard layer on every qubit, diagonal
// (multi-)controlled phases, and SWAP.
//
// Qubit j (1-based) is bit j-1 of the basis-state index, so qubit 1 is the
// least significant bit. Textual bitstrings are written ket-style with
// qubit n leftmost: "001" is the basis state with only qubit 1 set.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kforr/error.hpp"

namespace kforr {

using Amplitude = std::complex<double>;
using BasisIndex = std::uint64_t;

// 2^26 amplitudes = 1 GiB.
inline constexpr int kMaxQubits = 26;
// Dense unitaries are for operator identities at tiny scale only.
inline constexpr int kMaxUnitaryQubits = 6;

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kCircuitTolerance = 1e-10;

enum class GateKind { HadamardAll, PhaseFlip, ControlledPhase, Swap };

class Gate {
public:
    static Gate hadamard_all() { return Gate(GateKind::HadamardAll, {}, 0.0); }

    // Multiplies |z> by -1 iff every target bit of z is 1. Empty targets is
    // the identity (placeholder for a constant function).
    static Gate phase_flip(std::vector<int> targets) {
        check_targets(targets, 0, 3, "PhaseFlip");
        return Gate(GateKind::PhaseFlip, std::move(targets), 0.0);
    }

    // Multiplies |z> by e^{i angle} iff every target bit of z is 1, so
    // controlled_phase(J, pi) acts exactly like phase_flip(J).
    static Gate controlled_phase(std::vector<int> targets, double angle) {
        check_targets(targets, 1, 3, "ControlledPhase");
        return Gate(GateKind::ControlledPhase, std::move(targets), angle);
    }

    static Gate swap(int a, int b) {
        std::vector<int> targets{a, b};
        check_targets(targets, 2, 2, "Swap");
        return Gate(GateKind::Swap, std::move(targets), 0.0);
    }

    GateKind kind() const noexcept { return kind_; }
    const std::vector<int>& targets() const noexcept { return targets_; }
    double angle() const noexcept { return angle_; }

    // Bitmask of the targets in basis-index space.
    BasisIndex mask() const noexcept {
        BasisIndex m = 0;
        for (int q : targets_) m |= BasisIndex{1} << (q - 1);
        return m;
    }

    bool operator==(const Gate&) const = default;

private:
    Gate(GateKind kind, std::vector<int> targets, double angle)
        : kind_(kind), targets_(std::move(targets)), angle_(angle) {
        std::sort(targets_.begin(), targets_.end());
    }

    static void check_targets(const std::vector<int>& t, std::size_t lo, std::size_t hi,
                              const char* name) {
        if (t.size() < lo || t.size() > hi)
            throw ValidationError(std::string(name) + ": wrong number of target qubits");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < 1) throw ValidationError(std::string(name) + ": qubit index must be >= 1");
            for (std::size_t j = i + 1; j < t.size(); ++j)
                if (t[i] == t[j]) throw ValidationError(std::string(name) + ": duplicate qubit index");
        }
    }

    GateKind kind_;
    std::vector<int> targets_;
    double angle_;
};

namespace detail {

// e^{i angle}, exact when angle is a multiple of pi/2.
inline Amplitude unit_phase(double angle) {
    const double quarter_turns = angle / (std::numbers::pi / 2);
    if (std::nearbyint(quarter_turns) == quarter_turns && std::abs(quarter_turns) < 1e15) {
        auto r = static_cast<long long>(quarter_turns) % 4;
        if (r < 0) r += 4;
        switch (r) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    return std::polar(1.0, angle);
}

}  // namespace detail

class StateVector {
public:
    // |0...0> on n qubits.
    explicit StateVector(int n_qubits) : n_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits)
            throw CapacityError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                                std::to_string(kMaxQubits) + "]");
        amps_.assign(std::size_t{1} << n_qubits, Amplitude{});
        amps_[0] = 1.0;
    }

    // Computational basis state |z>.
    static StateVector basis(int n_qubits, BasisIndex z) {
        StateVector s(n_qubits);
        if (z >= s.size()) throw ValidationError("basis index out of range");
        s.amps_[0] = 0.0;
        s.amps_[z] = 1.0;
        return s;
    }

    int n_qubits() const noexcept { return n_; }
    std::size_t size() const noexcept { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    const Amplitude& operator[](BasisIndex z) const { return amps_[z]; }

    double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    double probability(BasisIndex z) const {
        if (z >= amps_.size()) throw ValidationError("basis index out of range");
        return std::norm(amps_[z]);
    }

    void apply(const Gate& g) {
        for (int q : g.targets())
            if (q > n_)
                throw ValidationError("gate targets qubit " + std::to_string(q) + " on a " +
                                      std::to_string(n_) + "-qubit state");
        switch (g.kind()) {
            case GateKind::HadamardAll: hadamard_all(); break;
            case GateKind::PhaseFlip: phase_flip(g.mask()); break;
            case GateKind::ControlledPhase: {
                const Amplitude phase = detail::unit_phase(g.angle());
                if (phase == Amplitude{-1.0, 0.0})
                    phase_flip(g.mask());
                else if (phase != Amplitude{1.0, 0.0})
                    controlled_phase(g.mask(), phase);
                break;
            }
            case GateKind::Swap: swap(g.targets()[0], g.targets()[1]); break;
        }
    }

    void apply(std::span<const Gate> gates) {
        for (const auto& g : gates) apply(g);
    }

    bool operator==(const StateVector&) const = default;

private:
    // Unnormalised butterflies followed by one 2^{-n/2} rescale; for even n
    // the rescale is an exact power of two.
    void hadamard_all() {
        const std::size_t dim = amps_.size();
        for (int q = 0; q < n_; ++q) {
            const std::size_t stride = std::size_t{1} << q;
            for (std::size_t block = 0; block < dim; block += 2 * stride) {
                for (std::size_t i = block; i < block + stride; ++i) {
                    const Amplitude a = amps_[i];
                    const Amplitude b = amps_[i + stride];
                    amps_[i] = a + b;
                    amps_[i + stride] = a - b;
                }
            }
        }
        double scale = std::ldexp(1.0, -(n_ / 2));
        if (n_ % 2 != 0) scale *= std::numbers::sqrt2 / 2;
        for (auto& a : amps_) a *= scale;
    }

    void phase_flip(BasisIndex mask) {
        if (mask == 0) return;
        for (BasisIndex z = 0; z < amps_.size(); ++z)
            if ((z & mask) == mask) amps_[z] = -amps_[z];
    }

    void controlled_phase(BasisIndex mask, Amplitude phase) {
        for (BasisIndex z = 0; z < amps_.size(); ++z)
            if ((z & mask) == mask) amps_[z] *= phase;
    }

    void swap(int qa, int qb) {
        const BasisIndex ma = BasisIndex{1} << (qa - 1);
        const BasisIndex mb = BasisIndex{1} << (qb - 1);
        for (BasisIndex z = 0; z < amps_.size(); ++z)
            if ((z & ma) && !(z & mb)) std::swap(amps_[z], amps_[z ^ ma ^ mb]);
    }

    int n_;
    std::vector<Amplitude> amps_;
};

inline StateVector init_zero(int n) { return StateVector(n); }

inline StateVector apply_gate(StateVector state, const Gate& g) {
    state.apply(g);
    return state;
}

// U|0^n> for the gate sequence U (first gate applied first).
inline StateVector run_circuit(std::span<const Gate> gates, int n) {
    StateVector s(n);
    s.apply(gates);
    return s;
}

// Parses a ket-style bitstring (qubit n leftmost).
inline BasisIndex parse_basis_state(std::string_view bits, int n) {
    if (static_cast<int>(bits.size()) != n)
        throw ValidationError("bitstring has " + std::to_string(bits.size()) + " bits, state has " +
                              std::to_string(n));
    BasisIndex z = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw ValidationError("bitstring must contain only 0 and 1");
        z = (z << 1) | static_cast<BasisIndex>(c == '1');
    }
    return z;
}

inline std::string format_basis_state(BasisIndex z, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int q = 0; q < n; ++q)
        if ((z >> q) & 1) s[static_cast<std::size_t>(n - 1 - q)] = '1';
    return s;
}

inline Amplitude amplitude(const StateVector& state, BasisIndex z) {
    if (z >= state.size()) throw ValidationError("basis index out of range");
    return state[z];
}

inline Amplitude amplitude(const StateVector& state, std::string_view bits) {
    return state[parse_basis_state(bits, state.n_qubits())];
}

// I.i.d. computational-basis measurements, deterministic in `seed`.
inline std::vector<BasisIndex> sample_measurements(const StateVector& state, std::size_t shots,
                                                   std::uint64_t seed) {
    if (shots == 0) throw ValidationError("shots must be >= 1");
    std::vector<double> weights(state.size());
    for (std::size_t z = 0; z < state.size(); ++z) weights[z] = std::norm(state[z]);
    std::discrete_distribution<BasisIndex> dist(weights.begin(), weights.end());
    std::mt19937_64 rng(seed);
    std::vector<BasisIndex> out(shots);
    for (auto& z : out) z = dist(rng);
    return out;
}

// Inverse circuit: reversed order, conjugated phases.
inline std::vector<Gate> adjoint(std::span<const Gate> gates) {
    std::vector<Gate> out;
    out.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        if (it->kind() == GateKind::ControlledPhase)
            out.push_back(Gate::controlled_phase(it->targets(), -it->angle()));
        else
            out.push_back(*it);
    }
    return out;
}

// Row-major dense complex matrix.
class ComplexMatrix {
public:
    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }
    Amplitude& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Amplitude& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.dim_ != b.dim_) throw ValidationError("matrix dimension mismatch");
        ComplexMatrix c(a.dim_);
        for (std::size_t i = 0; i < a.dim_; ++i)
            for (std::size_t k = 0; k < a.dim_; ++k)
                for (std::size_t j = 0; j < a.dim_; ++j) c(i, j) += a(i, k) * b(k, j);
        return c;
    }

private:
    std::size_t dim_;
    std::vector<Amplitude> data_;
};

// Matrix of the circuit whose first gate is gates[0], i.e. G_last ... G_1,
// in the same basis ordering as StateVector.
inline ComplexMatrix unitary_of(std::span<const Gate> gates, int n) {
    if (n < 1 || n > kMaxUnitaryQubits)
        throw CapacityError("unitary_of supports 1.." + std::to_string(kMaxUnitaryQubits) + " qubits");
    const std::size_t dim = std::size_t{1} << n;
    ComplexMatrix u(dim);
    for (std::size_t col = 0; col < dim; ++col) {
        StateVector s = StateVector::basis(n, col);
        s.apply(gates);
        for (std::size_t r = 0; r < dim; ++r) u(r, col) = s[r];
    }
    return u;
}

// max |a_ij - e^{i phi} b_ij| with the phase fixed by the largest entry of b.
inline double max_deviation_up_to_global_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw ValidationError("matrix dimension mismatch");
    std::size_t br = 0, bc = 0;
    for (std::size_t i = 0; i < b.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j)
            if (std::abs(b(i, j)) > std::abs(b(br, bc))) br = i, bc = j;
    Amplitude phase = 1.0;
    if (std::abs(b(br, bc)) > 0 && std::abs(a(br, bc)) > 0) {
        phase = a(br, bc) / b(br, bc);
        phase /= std::abs(phase);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - phase * b(i, j)));
    return worst;
}

}  // namespace kforr
