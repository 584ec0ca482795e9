// forrelation.hpp
// k-Forrelation instances over Boolean functions that depend on at most
// three input bits, their multi-hot encoding, and three independent ways of
// computing the forrelation value Phi:
//
//   phi_bruteforce    explicit 2^{kn}-term sum (test oracle)
//   phi_circuit       <0|U_F|0> with U_F = H U_{f_k} H ... H U_{f_1} H
//   phi_fixed_ansatz  same amplitude through the fixed controlled-phase ansatz
//
// oddk_extend appends the two-qubit SWAP gadget that turns an even-k
// instance into an odd-k one.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "kforr/error.hpp"
#include "kforr/qstate.hpp"

namespace kforr {

// Largest kn for which phi_bruteforce will run.
inline constexpr int kMaxBruteForceBits = 24;

// f(x) = (-1)^{prod_{j in bits} x_j}; no bits means f(x) = +1.
class BooleanFunctionSpec {
public:
    BooleanFunctionSpec() = default;

    explicit BooleanFunctionSpec(std::vector<int> bits) : bits_(std::move(bits)) {
        std::sort(bits_.begin(), bits_.end());
        if (bits_.size() > 3) throw ValidationError("a function may depend on at most three bits");
        if (std::adjacent_find(bits_.begin(), bits_.end()) != bits_.end())
            throw ValidationError("duplicate bit index in function");
        if (!bits_.empty() && bits_.front() < 1) throw ValidationError("bit indices start at 1");
    }

    static BooleanFunctionSpec constant() { return {}; }

    const std::vector<int>& bits() const noexcept { return bits_; }
    bool is_constant() const noexcept { return bits_.empty(); }
    int max_bit() const noexcept { return bits_.empty() ? 0 : bits_.back(); }

    BasisIndex mask() const noexcept {
        BasisIndex m = 0;
        for (int j : bits_) m |= BasisIndex{1} << (j - 1);
        return m;
    }

    // +1 or -1 for an input given as a bitmask (bit j-1 is x_j).
    int evaluate(BasisIndex x) const noexcept {
        const BasisIndex m = mask();
        return (m != 0 && (x & m) == m) ? -1 : 1;
    }

    bool operator==(const BooleanFunctionSpec&) const = default;

private:
    std::vector<int> bits_;
};

class ForrelationInstance {
public:
    ForrelationInstance(int n, std::vector<BooleanFunctionSpec> functions)
        : n_(n), functions_(std::move(functions)) {
        if (n < 1) throw ValidationError("n must be >= 1");
        if (functions_.empty()) throw ValidationError("an instance needs k >= 1 functions");
        for (const auto& f : functions_)
            if (f.max_bit() > n)
                throw ValidationError("function uses bit " + std::to_string(f.max_bit()) +
                                      " but n = " + std::to_string(n));
    }

    int n() const noexcept { return n_; }
    int k() const noexcept { return static_cast<int>(functions_.size()); }
    const std::vector<BooleanFunctionSpec>& functions() const noexcept { return functions_; }

    // The completeness condition: at least one function uses exactly three bits.
    bool promise_complete_form() const noexcept {
        return std::any_of(functions_.begin(), functions_.end(),
                           [](const auto& f) { return f.bits().size() == 3; });
    }

    bool operator==(const ForrelationInstance&) const = default;

private:
    int n_;
    std::vector<BooleanFunctionSpec> functions_;
};

// Multi-hot vector of length k*n; block i is the indicator of f_i's bits.
class EncodedSample {
public:
    EncodedSample(int n, int k, std::vector<std::uint8_t> bits) : n_(n), k_(k), bits_(std::move(bits)) {
        if (n < 1 || k < 1) throw ValidationError("n and k must be >= 1");
        if (bits_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(k))
            throw ValidationError("encoded sample length must equal k*n");
        for (int i = 0; i < k; ++i) {
            int ones = 0;
            for (int j = 0; j < n; ++j) {
                const auto b = bits_[static_cast<std::size_t>(i * n + j)];
                if (b > 1) throw MalformedSampleError("encoded sample entries must be 0 or 1");
                ones += b;
            }
            if (ones > 3)
                throw MalformedSampleError("block " + std::to_string(i + 1) + " has " +
                                           std::to_string(ones) + " ones (at most 3 allowed)");
        }
    }

    // From a block-major '0'/'1' string.
    static EncodedSample from_string(int n, int k, const std::string& s) {
        std::vector<std::uint8_t> bits;
        bits.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1') throw ValidationError("bit string must contain only 0 and 1");
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return EncodedSample(n, k, std::move(bits));
    }

    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    std::span<const std::uint8_t> block(int i) const {
        return std::span<const std::uint8_t>(bits_).subspan(static_cast<std::size_t>(i * n_),
                                                            static_cast<std::size_t>(n_));
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
        return s;
    }

    bool operator==(const EncodedSample&) const = default;

private:
    int n_;
    int k_;
    std::vector<std::uint8_t> bits_;
};

// A forrelation value; always |value| <= 1 up to rounding.
class Phi {
public:
    explicit Phi(double value) : value_(value) {
        if (!(std::abs(value) <= 1.0 + kExactTolerance))
            throw InvariantViolation("forrelation value " + std::to_string(value) + " outside [-1, 1]");
    }

    double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }

private:
    double value_;
};

inline EncodedSample encode(const ForrelationInstance& inst) {
    const auto n = static_cast<std::size_t>(inst.n());
    std::vector<std::uint8_t> bits(n * static_cast<std::size_t>(inst.k()), 0);
    for (std::size_t i = 0; i < inst.functions().size(); ++i)
        for (int j : inst.functions()[i].bits()) bits[i * n + static_cast<std::size_t>(j - 1)] = 1;
    return EncodedSample(inst.n(), inst.k(), std::move(bits));
}

inline ForrelationInstance decode(const EncodedSample& sample) {
    std::vector<BooleanFunctionSpec> functions;
    functions.reserve(static_cast<std::size_t>(sample.k()));
    for (int i = 0; i < sample.k(); ++i) {
        std::vector<int> bits;
        auto block = sample.block(i);
        for (std::size_t j = 0; j < block.size(); ++j)
            if (block[j]) bits.push_back(static_cast<int>(j) + 1);
        functions.emplace_back(std::move(bits));
    }
    return ForrelationInstance(sample.n(), std::move(functions));
}

// Sum over all (x_1, ..., x_k) of f_1(x_1)(-1)^{x_1.x_2} f_2(x_2) ... f_k(x_k),
// scaled by 2^{-(k+1)n/2}. The sum is accumulated in integers, so the only
// rounding is the final scale.
inline Phi phi_bruteforce(const ForrelationInstance& inst) {
    const int n = inst.n();
    const int k = inst.k();
    if (static_cast<long long>(k) * n > kMaxBruteForceBits)
        throw CapacityError("phi_bruteforce requires k*n <= " + std::to_string(kMaxBruteForceBits));

    const BasisIndex dim = BasisIndex{1} << n;
    std::vector<BasisIndex> masks;
    for (const auto& f : inst.functions()) masks.push_back(f.mask());

    auto f_sign = [&](int i, BasisIndex x) -> int {
        const BasisIndex m = masks[static_cast<std::size_t>(i)];
        return (m != 0 && (x & m) == m) ? -1 : 1;
    };

    // Explicit odometer over the k-tuple of n-bit inputs.
    std::vector<BasisIndex> x(static_cast<std::size_t>(k), 0);
    long long total = 0;
    while (true) {
        int term = f_sign(0, x[0]);
        for (int i = 1; i < k; ++i) {
            const auto xi = x[static_cast<std::size_t>(i)];
            if (std::popcount(x[static_cast<std::size_t>(i - 1)] & xi) & 1) term = -term;
            term *= f_sign(i, xi);
        }
        total += term;

        int pos = k - 1;
        while (pos >= 0 && ++x[static_cast<std::size_t>(pos)] == dim) {
            x[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }

    const int exponent = (k + 1) * n;  // scale = 2^{-exponent/2}
    double scale = std::ldexp(1.0, -(exponent / 2));
    if (exponent % 2 != 0) scale *= std::numbers::sqrt2 / 2;
    return Phi(static_cast<double>(total) * scale);
}

// H, U_{f_1}, H, ..., U_{f_k}, H. Constant functions become PhaseFlip({}),
// so the sequence always has 2k+1 gates.
inline std::vector<Gate> build_circuit(const ForrelationInstance& inst) {
    std::vector<Gate> gates;
    gates.reserve(2 * inst.functions().size() + 1);
    gates.push_back(Gate::hadamard_all());
    for (const auto& f : inst.functions()) {
        gates.push_back(Gate::phase_flip(f.bits()));
        gates.push_back(Gate::hadamard_all());
    }
    return gates;
}

namespace detail {

inline Phi real_amplitude_at_zero(const StateVector& state) {
    const Amplitude a = state[0];
    if (std::abs(a.imag()) > kExactTolerance)
        throw InvariantViolation("forrelation amplitude has imaginary part " + std::to_string(a.imag()));
    return Phi(a.real());
}

}  // namespace detail

inline Phi phi_circuit(const ForrelationInstance& inst) {
    const auto gates = build_circuit(inst);
    return detail::real_amplitude_at_zero(run_circuit(gates, inst.n()));
}

// All target sets of size 1, 2 and 3 over n qubits in the fixed slot order
// (by size, then lexicographic).
inline std::vector<std::vector<int>> fixed_ansatz_slots(int n) {
    std::vector<std::vector<int>> slots;
    for (int a = 1; a <= n; ++a) slots.push_back({a});
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) slots.push_back({a, b});
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            for (int c = b + 1; c <= n; ++c) slots.push_back({a, b, c});
    return slots;
}

// k (n + n(n-1)/2 + n(n-1)(n-2)/6)
inline long long fixed_ansatz_parameter_count(int n, int k) {
    const long long m = n;
    return k * (m + m * (m - 1) / 2 + m * (m - 1) * (m - 2) / 6);
}

// Rotation angle for slot J given one function block x:
// pi * prod_{j in J} x_j * prod_{l not in J} (1 - x_l).
inline double fixed_ansatz_angle(std::span<const std::uint8_t> block, const std::vector<int>& slot) {
    double lambda = std::numbers::pi;
    std::size_t next = 0;
    for (std::size_t l = 0; l < block.size(); ++l) {
        const bool in_slot = next < slot.size() && slot[next] == static_cast<int>(l) + 1;
        if (in_slot) {
            lambda *= block[l];
            ++next;
        } else {
            lambda *= 1 - block[l];
        }
    }
    return lambda;
}

// Same H layer layout as build_circuit, but every function layer holds all
// C(n,1)+C(n,2)+C(n,3) controlled-phase slots with data-dependent angles.
inline std::vector<Gate> build_fixed_ansatz(const EncodedSample& sample) {
    const auto slots = fixed_ansatz_slots(sample.n());
    std::vector<Gate> gates;
    gates.reserve(static_cast<std::size_t>(sample.k()) * (slots.size() + 1) + 1);
    gates.push_back(Gate::hadamard_all());
    for (int i = 0; i < sample.k(); ++i) {
        const auto block = sample.block(i);
        for (const auto& slot : slots) gates.push_back(Gate::controlled_phase(slot, fixed_ansatz_angle(block, slot)));
        gates.push_back(Gate::hadamard_all());
    }
    return gates;
}

inline Phi phi_fixed_ansatz(const EncodedSample& sample) {
    const auto gates = build_fixed_ansatz(sample);
    return detail::real_amplitude_at_zero(run_circuit(gates, sample.n()));
}

struct OddKExtension {
    ForrelationInstance instance;
    bool modified = false;       // false when k was already odd
    bool ancilla_added = false;  // n was odd; qubit n+1 pairs with qubit n
    int gadget_pairs = 0;
};

// Makes k odd by appending 4*ceil(n/2) - 1 functions: for each qubit pair
// (1,2), (3,4), ... three copies of (-1)^{x_i x_j}, with a constant
// function between consecutive pairs. Each block of three CZ layers plus the
// surrounding Hadamard layers acts as SWAP H on its pair, so for even n the
// extended circuit is (product of SWAPs) U_F and Phi is unchanged.
//
// For odd n an ancilla qubit n+1 completes the last pair. The ancilla sees
// the original k+1 Hadamard layers (odd count for even k), so it reaches the
// gadgets in |+> rather than |0> and the extended value is Phi / sqrt(2).
inline OddKExtension oddk_extend(const ForrelationInstance& inst) {
    if (inst.k() % 2 != 0) return OddKExtension{inst, false, false, 0};
    if (inst.n() < 2) throw ValidationError("oddk_extend requires n >= 2");

    const bool ancilla = inst.n() % 2 != 0;
    const int n_out = ancilla ? inst.n() + 1 : inst.n();
    const int pairs = n_out / 2;

    std::vector<BooleanFunctionSpec> functions = inst.functions();
    functions.reserve(functions.size() + static_cast<std::size_t>(4 * pairs - 1));
    for (int p = 0; p < pairs; ++p) {
        if (p > 0) functions.push_back(BooleanFunctionSpec::constant());
        const BooleanFunctionSpec cz({2 * p + 1, 2 * p + 2});
        for (int r = 0; r < 3; ++r) functions.push_back(cz);
    }
    return OddKExtension{ForrelationInstance(n_out, std::move(functions)), true, ancilla, pairs};
}

// H CZ H CZ H CZ H on qubits (1,2) of a two-qubit register.
inline std::vector<Gate> swap_gadget() {
    std::vector<Gate> g{Gate::hadamard_all()};
    for (int r = 0; r < 3; ++r) {
        g.push_back(Gate::phase_flip({1, 2}));
        g.push_back(Gate::hadamard_all());
    }
    return g;
}

}  // namespace kforr
