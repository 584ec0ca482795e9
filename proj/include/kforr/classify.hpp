// classify.hpp
// Variational quantum classifier and two-sample quantum-kernel SVM using the
// forrelation circuit U_F(x) as feature map, with W(theta) = I and the
// measurement projector |0^n><0^n|.
//
// Both models are evaluated either exactly (amplitudes) or from simulated
// computational-basis shots.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "kforr/error.hpp"
#include "kforr/forrelation.hpp"
#include "kforr/qstate.hpp"

namespace kforr {

enum class Label : int { Positive = 1, Negative = -1 };

inline int to_int(Label l) noexcept { return static_cast<int>(l); }

struct ExactMode {};

struct SampledMode {
    std::size_t shots = 1;
    std::uint64_t seed = 0;
};

using EvalMode = std::variant<ExactMode, SampledMode>;

// Bias interval for which the VQC rule decides the promise problem. The
// lower end is +7/25 (a positive sample needs 9/25 > (1-b)/2).
inline constexpr double kVqcBiasLow = 7.0 / 25.0;
inline constexpr double kVqcBiasHigh = 4999.0 / 5000.0;

// Promise thresholds on Phi.
inline constexpr double kPositiveThreshold = 3.0 / 5.0;
inline constexpr double kNegativeThreshold = 1.0 / 100.0;

struct VqcModel {
    double bias = 0.0;
    EvalMode mode = ExactMode{};

    // Any bias in [-1, 1].
    static VqcModel with_bias(double bias, EvalMode mode = ExactMode{}) {
        if (!(bias >= -1.0 && bias <= 1.0)) throw ValidationError("VQC bias must lie in [-1, 1]");
        return VqcModel{bias, mode};
    }

    // Midpoint of (7/25, 4999/5000).
    static VqcModel default_for_forrelation(EvalMode mode = ExactMode{}) {
        return VqcModel{(kVqcBiasLow + kVqcBiasHigh) / 2, mode};
    }
};

namespace detail {

inline double frequency(const std::vector<BasisIndex>& shots, BasisIndex z) {
    const auto hits = std::count(shots.begin(), shots.end(), z);
    return static_cast<double>(hits) / static_cast<double>(shots.size());
}

// Probability of |0^n> after `gates`, exactly or from shots.
inline double zero_probability(const std::vector<Gate>& gates, int n, const EvalMode& mode) {
    const StateVector s = run_circuit(gates, n);
    if (const auto* sampled = std::get_if<SampledMode>(&mode))
        return frequency(sample_measurements(s, sampled->shots, sampled->seed), 0);
    return s.probability(0);
}

}  // namespace detail

// p_{+1}(x) = |<0^n|U_F(x)|0^n>|^2 = Phi^2.
inline double vqc_probability(const EncodedSample& sample, const EvalMode& mode = ExactMode{}) {
    return detail::zero_probability(build_circuit(decode(sample)), sample.n(), mode);
}

// +1 iff p_{+1}(x) > (1 - b)/2; ties go to -1.
inline Label vqc_classify(const EncodedSample& sample, const VqcModel& model) {
    return vqc_probability(sample, model.mode) > (1.0 - model.bias) / 2 ? Label::Positive : Label::Negative;
}

class KernelValue {
public:
    explicit KernelValue(double value) : value_(value) {
        if (!(value >= -kExactTolerance && value <= 1.0 + kExactTolerance))
            throw InvariantViolation("kernel value outside [0, 1]");
    }

    double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }

private:
    double value_;
};

// |<0^n| U_F(xi)^dagger U_F(xj) |0^n>|^2.
inline KernelValue kernel(const EncodedSample& xi, const EncodedSample& xj, const EvalMode& mode = ExactMode{}) {
    if (xi.n() != xj.n() || xi.k() != xj.k()) throw ValidationError("kernel arguments must share n and k");
    std::vector<Gate> gates = build_circuit(decode(xj));
    const auto inverse = adjoint(build_circuit(decode(xi)));
    gates.insert(gates.end(), inverse.begin(), inverse.end());
    return KernelValue(detail::zero_probability(gates, xi.n(), mode));
}

inline constexpr double kDefaultBoxC = 1e6;

struct DualSolution {
    double alpha = 0.0;
    double bias = 0.0;
    EncodedSample x_plus;
    EncodedSample x_minus;
    double box_c = kDefaultBoxC;
    double k12 = 0.0;
    // Set when U_F(x+)|0> = |0> and U_F(x-)|0> = |z>, which lets the decision
    // value be read off one measurement distribution of U_F(s)|0>.
    std::optional<BasisIndex> minus_basis_state;

    double bias_low() const noexcept { return kVqcBiasLow * alpha; }
    double bias_high() const noexcept { return kVqcBiasHigh * alpha; }
};

// m = 2 dual objective with y = (+1, -1), alpha_1 = alpha_2 = alpha and
// k(x, x) = 1: 2 alpha - alpha^2 (1 - k12).
inline double dual_objective(double alpha, double k12) noexcept {
    return 2 * alpha - alpha * alpha * (1 - k12);
}

// Maximiser of dual_objective over [0, box_c] for k12 < 1.
inline double optimal_alpha(double k12, double box_c) {
    if (!(box_c > 0)) throw ValidationError("box constraint C must be > 0");
    if (k12 >= 1.0 - kExactTolerance)
        throw DegenerateTrainingSetError("training samples are indistinguishable under the feature map");
    return std::min(1.0 / (1.0 - k12), box_c);
}

namespace detail {

// Index z with |<z|psi>|^2 = 1, if psi is a basis state.
inline std::optional<BasisIndex> basis_state_of(const StateVector& s) {
    for (BasisIndex z = 0; z < s.size(); ++z)
        if (std::abs(s.probability(z) - 1.0) <= kExactTolerance) return z;
    return std::nullopt;
}

}  // namespace detail

inline DualSolution qsvm_train(const EncodedSample& x_plus, const EncodedSample& x_minus,
                               double box_c = kDefaultBoxC) {
    if (!(box_c > 0)) throw ValidationError("box constraint C must be > 0");
    const double k12 = kernel(x_plus, x_minus).value();

    DualSolution sol{0.0, 0.0, x_plus, x_minus, box_c, k12, std::nullopt};
    sol.alpha = optimal_alpha(k12, box_c);
    sol.bias = (sol.bias_low() + sol.bias_high()) / 2;

    const auto plus_state = detail::basis_state_of(run_circuit(build_circuit(decode(x_plus)), x_plus.n()));
    const auto minus_state = detail::basis_state_of(run_circuit(build_circuit(decode(x_minus)), x_minus.n()));
    if (plus_state == BasisIndex{0} && minus_state && *minus_state != 0) sol.minus_basis_state = minus_state;
    return sol;
}

// alpha (k(x+, s) - k(x-, s)) + b.
inline double qsvm_decision_value(const EncodedSample& s, const DualSolution& sol, const EvalMode& mode = ExactMode{}) {
    if (s.n() != sol.x_plus.n() || s.k() != sol.x_plus.k())
        throw ValidationError("sample shape does not match the training samples");
    if (sol.minus_basis_state) {
        const StateVector state = run_circuit(build_circuit(decode(s)), s.n());
        const BasisIndex z = *sol.minus_basis_state;
        double p0 = 0.0;
        double pz = 0.0;
        if (const auto* sampled = std::get_if<SampledMode>(&mode)) {
            const auto shots = sample_measurements(state, sampled->shots, sampled->seed);
            p0 = detail::frequency(shots, 0);
            pz = detail::frequency(shots, z);
        } else {
            p0 = state.probability(0);
            pz = state.probability(z);
        }
        return sol.alpha * (p0 - pz) + sol.bias;
    }
    EvalMode second = mode;
    if (auto* sampled = std::get_if<SampledMode>(&second)) sampled->seed ^= 0x9e3779b97f4a7c15ULL;
    return sol.alpha * (kernel(sol.x_plus, s, mode).value() - kernel(sol.x_minus, s, second).value()) + sol.bias;
}

// sign(decision value) with sign(0) -> -1.
inline Label qsvm_classify(const EncodedSample& s, const DualSolution& sol, const EvalMode& mode = ExactMode{}) {
    return qsvm_decision_value(s, sol, mode) > 0 ? Label::Positive : Label::Negative;
}

// Hoeffding: ceil(ln(2/delta) / (2 epsilon^2)) shots give |p_hat - p| <= epsilon
// with probability at least 1 - delta.
inline std::size_t shot_budget_for(double epsilon, double delta) {
    if (!(epsilon > 0 && epsilon < 1)) throw ValidationError("epsilon must lie in (0, 1)");
    if (!(delta > 0 && delta < 1)) throw ValidationError("delta must lie in (0, 1)");
    const double shots = std::ceil(std::log(2.0 / delta) / (2.0 * epsilon * epsilon));
    return std::max<std::size_t>(1, static_cast<std::size_t>(shots));
}

}  // namespace kforr
