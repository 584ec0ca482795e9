// verify.hpp
// Cross-module invariant suite behind `kforr verify`: oracle equivalence,
// fixed-ansatz equivalence, the SWAP gadget identity, the constructive
// training pair and odd-k extension.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kforr/classify.hpp"
#include "kforr/datagen.hpp"
#include "kforr/forrelation.hpp"
#include "kforr/qstate.hpp"

namespace kforr {

struct CheckResult {
    std::string name;
    bool pass = false;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    long long cases = 0;
};

struct VerifyOptions {
    int sweep_n = 2;  // exhaustive oracle sweep over every instance at (sweep_n, sweep_k)
    int sweep_k = 3;
    std::uint64_t seed = 1;
    int random_cases = 200;
    // Added to every circuit-side Phi; non-zero only to exercise the failure path.
    double fault = 0.0;
};

// Calls fn on every instance with k functions of at most three bits over n.
inline void for_each_instance(int n, int k, const std::function<void(const ForrelationInstance&)>& fn) {
    std::vector<BooleanFunctionSpec> forms{BooleanFunctionSpec::constant()};
    for (auto& s : fixed_ansatz_slots(n)) forms.emplace_back(std::move(s));
    std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
    while (true) {
        std::vector<BooleanFunctionSpec> fs;
        for (auto i : idx) fs.push_back(forms[i]);
        fn(ForrelationInstance(n, std::move(fs)));
        int pos = k - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == forms.size()) idx[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) return;
    }
}

inline double max_elementwise_deviation(const StateVector& a, const StateVector& b) {
    if (a.size() != b.size()) return INFINITY;
    double worst = 0.0;
    for (std::size_t z = 0; z < a.size(); ++z) worst = std::max(worst, std::abs(a[z] - b[z]));
    return worst;
}

inline std::vector<CheckResult> run_verification(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(opt.seed);
    auto finish = [&](CheckResult r) {
        r.pass = r.max_deviation <= r.tolerance;
        out.push_back(std::move(r));
    };

    {
        CheckResult r{"oracle_exhaustive_n" + std::to_string(opt.sweep_n) + "_k" + std::to_string(opt.sweep_k), false,
                      0.0, kCircuitTolerance, 0};
        for_each_instance(opt.sweep_n, opt.sweep_k, [&](const ForrelationInstance& inst) {
            const double d = std::abs(phi_bruteforce(inst) - (phi_circuit(inst) + opt.fault));
            r.max_deviation = std::max(r.max_deviation, d);
            ++r.cases;
        });
        finish(r);
    }
    {
        CheckResult r{"oracle_random", false, 0.0, kCircuitTolerance, 0};
        std::uniform_int_distribution<int> pick_n(1, 4);
        for (int c = 0; c < opt.random_cases; ++c) {
            const int n = pick_n(rng);
            std::uniform_int_distribution<int> pick_k(1, 16 / n);
            const auto inst = sample_random_instance(n, pick_k(rng), rng, false);
            r.max_deviation = std::max(r.max_deviation, std::abs(phi_bruteforce(inst) - (phi_circuit(inst) + opt.fault)));
            ++r.cases;
        }
        finish(r);
    }
    {
        CheckResult r{"fixed_ansatz_statevector", false, 0.0, kCircuitTolerance, 0};
        std::uniform_int_distribution<int> pick(1, 5);
        for (int c = 0; c < opt.random_cases; ++c) {
            const auto sample = encode(sample_random_instance(pick(rng), pick(rng), rng, false));
            const auto direct = run_circuit(build_circuit(decode(sample)), sample.n());
            const auto ansatz = run_circuit(build_fixed_ansatz(sample), sample.n());
            r.max_deviation = std::max(r.max_deviation, max_elementwise_deviation(direct, ansatz) + std::abs(opt.fault));
            ++r.cases;
        }
        finish(r);
    }
    {
        CheckResult r{"swap_gadget_identity", false, 0.0, kExactTolerance, 1};
        const std::vector<Gate> rhs{Gate::hadamard_all(), Gate::swap(1, 2)};
        r.max_deviation = max_deviation_up_to_global_phase(unitary_of(swap_gadget(), 2), unitary_of(rhs, 2));
        finish(r);
    }
    {
        CheckResult r{"constructive_samples", false, 0.0, kExactTolerance, 0};
        for (int n = 3; n <= 10; ++n)
            for (int k = 3; k <= 9; k += 2) {
                const auto pos = make_positive_sample(n, k, 1, 2, 3);
                const auto p0 = run_circuit(build_circuit(decode(pos.sample)), n).probability(0);
                r.max_deviation = std::max(r.max_deviation, std::abs(p0 - 1.0));
                for (int j = 1; j <= n; ++j) {
                    const auto neg = make_negative_sample(n, k, j, {1, 2, 3});
                    const auto pz = run_circuit(build_circuit(decode(neg.sample)), n).probability(BasisIndex{1} << (j - 1));
                    r.max_deviation = std::max(r.max_deviation, std::abs(pz - 1.0));
                }
                ++r.cases;
            }
        finish(r);
    }
    {
        CheckResult even{"oddk_preservation_even_n", false, 0.0, kCircuitTolerance, 0};
        CheckResult odd{"oddk_ancilla_scaling_odd_n", false, 0.0, kCircuitTolerance, 0};
        std::uniform_int_distribution<int> pick_n(2, 4);
        for (int c = 0; c < opt.random_cases; ++c) {
            const int n = pick_n(rng);
            const int k = (c % 2 == 0) ? 2 : 4;
            const auto inst = sample_random_instance(n, k, rng, false);
            const auto ext = oddk_extend(inst);
            const double phi = phi_circuit(inst);
            const double phi_ext = phi_circuit(ext.instance) + opt.fault;
            const bool count_ok = ext.instance.k() == k + 4 * ((n + 1) / 2) - 1;
            auto& r = (n % 2 == 0) ? even : odd;
            const double expected = (n % 2 == 0) ? phi : phi / std::numbers::sqrt2;
            r.max_deviation = std::max(r.max_deviation, count_ok ? std::abs(phi_ext - expected) : INFINITY);
            ++r.cases;
        }
        finish(even);
        finish(odd);
    }
    return out;
}

}  // namespace kforr
