#include "kforr/forrelation.hpp"
#include "kforr/datagen.hpp"
#include "kforr/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace kforr;

namespace {

using Fn = BooleanFunctionSpec;

ForrelationInstance worked_example() {
    // f1 = (-1)^{x1 x3}, f2 = +1, f3 = (-1)^{x2}
    return ForrelationInstance(3, {Fn({1, 3}), Fn(), Fn({2})});
}

std::vector<std::uint8_t> v(std::initializer_list<int> bits) {
    std::vector<std::uint8_t> out;
    for (int b : bits) out.push_back(static_cast<std::uint8_t>(b));
    return out;
}

}  // namespace

TEST(Encode, WorkedExample) {
    EXPECT_EQ(encode(worked_example()).bits(), v({1, 0, 1, 0, 0, 0, 0, 1, 0}));
}

TEST(Encode, ConstantsEncodeAsZero) {
    const ForrelationInstance inst(2, {Fn(), Fn(), Fn()});
    EXPECT_EQ(encode(inst).bits(), v({0, 0, 0, 0, 0, 0}));
}

TEST(Encode, FullIndicator) {
    const ForrelationInstance inst(3, {Fn({1, 2, 3})});
    EXPECT_EQ(encode(inst).bits(), v({1, 1, 1}));
}

TEST(Decode, WorkedExample) {
    const auto inst = decode(EncodedSample(3, 3, v({1, 0, 1, 0, 0, 0, 0, 1, 0})));
    EXPECT_EQ(inst, worked_example());
    EXPECT_EQ(inst.functions()[0].bits(), (std::vector<int>{1, 3}));
    EXPECT_TRUE(inst.functions()[1].is_constant());
    EXPECT_EQ(inst.functions()[2].bits(), (std::vector<int>{2}));
}

TEST(Decode, ZeroVectorGivesConstants) {
    const auto inst = decode(EncodedSample(2, 2, v({0, 0, 0, 0})));
    EXPECT_EQ(inst.k(), 2);
    for (const auto& f : inst.functions()) EXPECT_TRUE(f.is_constant());
}

TEST(Decode, FourOnesIsMalformed) {
    EXPECT_THROW(EncodedSample(4, 1, v({1, 1, 1, 1})), MalformedSampleError);
}

TEST(Instance, Validation) {
    EXPECT_THROW(Fn({1, 2, 3, 4}), ValidationError);
    EXPECT_THROW(Fn({2, 2}), ValidationError);
    EXPECT_THROW(ForrelationInstance(2, {Fn({3})}), ValidationError);
    EXPECT_THROW(ForrelationInstance(2, {}), ValidationError);
    EXPECT_FALSE(worked_example().promise_complete_form());
    EXPECT_TRUE(ForrelationInstance(3, {Fn({1, 2, 3})}).promise_complete_form());
}

TEST(RoundTrip, ExhaustiveSmall) {
    for (int n = 1; n <= 3; ++n)
        for (int k = 1; k <= 3; ++k)
            for_each_instance(n, k, [](const ForrelationInstance& inst) { ASSERT_EQ(decode(encode(inst)), inst); });
}

TEST(RoundTrip, RandomLarger) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 300; ++t) {
        const auto inst = sample_random_instance(8, 7, rng, false);
        ASSERT_EQ(decode(encode(inst)), inst);
    }
}

// Values below are frozen from an independent Python enumeration of the
// 2^{kn}-term sum.
TEST(PhiBruteforce, FrozenValues) {
    EXPECT_DOUBLE_EQ(phi_bruteforce(ForrelationInstance(1, {Fn(), Fn(), Fn()})), 1.0);
    EXPECT_DOUBLE_EQ(phi_bruteforce(ForrelationInstance(1, {Fn({1})})), 0.0);
    EXPECT_DOUBLE_EQ(phi_bruteforce(ForrelationInstance(2, {Fn({1}), Fn(), Fn()})), 0.0);
    EXPECT_DOUBLE_EQ(phi_bruteforce(ForrelationInstance(2, {Fn({1, 2}), Fn({1})})), 0.5);
    EXPECT_DOUBLE_EQ(phi_bruteforce(ForrelationInstance(3, {Fn({1, 2, 3}), Fn({1}), Fn({2, 3})})), 0.75);
    EXPECT_DOUBLE_EQ(phi_bruteforce(ForrelationInstance(2, {Fn({1, 2}), Fn({2}), Fn({1, 2}), Fn({1})})), -0.5);
    EXPECT_DOUBLE_EQ(phi_bruteforce(worked_example()), 0.0);
}

TEST(PhiBruteforce, CapacityLimit) {
    EXPECT_THROW(phi_bruteforce(ForrelationInstance(5, std::vector<Fn>(5))), CapacityError);
    EXPECT_NO_THROW(phi_bruteforce(ForrelationInstance(4, std::vector<Fn>(3))));
}

TEST(BuildCircuit, SingleFunction) {
    const auto g = build_circuit(ForrelationInstance(1, {Fn({1})}));
    const std::vector<Gate> expected{Gate::hadamard_all(), Gate::phase_flip({1}), Gate::hadamard_all()};
    EXPECT_EQ(g, expected);
}

TEST(BuildCircuit, WorkedExampleLayout) {
    const auto g = build_circuit(worked_example());
    ASSERT_EQ(g.size(), 7u);
    for (std::size_t i = 0; i < g.size(); i += 2) EXPECT_EQ(g[i].kind(), GateKind::HadamardAll);
    EXPECT_EQ(g[1], Gate::phase_flip({1, 3}));
    EXPECT_EQ(g[3], Gate::phase_flip({}));
    EXPECT_EQ(g[5], Gate::phase_flip({2}));
}

TEST(BuildCircuit, AllConstantOddKIsIdentityOnZero) {
    const auto s = run_circuit(build_circuit(ForrelationInstance(3, std::vector<Fn>(3))), 3);
    EXPECT_NEAR(s.probability(0), 1.0, 1e-12);
}

TEST(PhiCircuit, KnownValues) {
    EXPECT_NEAR(phi_circuit(ForrelationInstance(4, std::vector<Fn>(5))), 1.0, 1e-12);
    const auto neg = make_negative_sample(4, 5, 2, {1, 3, 4});
    EXPECT_NEAR(phi_circuit(decode(neg.sample)), 0.0, 1e-12);
}

TEST(PhiCircuit, MatchesBruteforceExhaustiveN2K3) {
    long long count = 0;
    for_each_instance(2, 3, [&](const ForrelationInstance& inst) {
        ASSERT_LE(std::abs(phi_circuit(inst) - phi_bruteforce(inst)), 1e-10);
        ++count;
    });
    EXPECT_EQ(count, 64);
}

TEST(PhiCircuit, MatchesBruteforceRandom) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick_n(1, 4);
    for (int t = 0; t < 300; ++t) {
        const int n = pick_n(rng);
        std::uniform_int_distribution<int> pick_k(1, 16 / n);
        const auto inst = sample_random_instance(n, pick_k(rng), rng, false);
        const double a = phi_circuit(inst);
        const double b = phi_bruteforce(inst);
        ASSERT_LE(std::abs(a - b), 1e-10);
        ASSERT_LE(std::abs(a), 1.0 + 1e-12);
    }
}

TEST(PhiCircuit, AmplitudeIsReal) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
        const auto inst = sample_random_instance(5, 5, rng);
        const auto s = run_circuit(build_circuit(inst), 5);
        EXPECT_LE(std::abs(s[0].imag()), 1e-12);
    }
}

TEST(Phi, RejectsOutOfRange) {
    EXPECT_THROW(Phi(1.1), InvariantViolation);
    EXPECT_NO_THROW(Phi(-1.0));
}

TEST(FixedAnsatz, SlotCounts) {
    EXPECT_EQ(fixed_ansatz_slots(3).size(), 7u);
    EXPECT_EQ(fixed_ansatz_parameter_count(3, 3), 21);
    for (int n = 1; n <= 8; ++n)
        EXPECT_EQ(static_cast<long long>(fixed_ansatz_slots(n).size()),
                  n + n * (n - 1) / 2 + n * (n - 1) * (n - 2) / 6);
}

TEST(FixedAnsatz, ConstantBlockHasZeroAngles) {
    const EncodedSample sample(3, 1, v({0, 0, 0}));
    for (const auto& g : build_fixed_ansatz(sample)) {
        if (g.kind() == GateKind::ControlledPhase) {
            EXPECT_EQ(g.angle(), 0.0);
        }
    }
}

TEST(FixedAnsatz, SingleNonZeroAngle) {
    const EncodedSample sample(3, 1, v({1, 0, 1}));
    int pi_slots = 0;
    for (const auto& g : build_fixed_ansatz(sample)) {
        if (g.kind() != GateKind::ControlledPhase) continue;
        if (g.targets() == std::vector<int>{1, 3}) {
            EXPECT_EQ(g.angle(), std::numbers::pi);
            ++pi_slots;
        } else {
            EXPECT_EQ(g.angle(), 0.0);
        }
    }
    EXPECT_EQ(pi_slots, 1);
}

TEST(FixedAnsatz, GateLayout) {
    const auto sample = encode(worked_example());
    const auto g = build_fixed_ansatz(sample);
    EXPECT_EQ(g.size(), 3u * 7u + 4u);
    long long param = 0;
    for (const auto& gate : g) param += gate.kind() == GateKind::ControlledPhase;
    EXPECT_EQ(param, fixed_ansatz_parameter_count(3, 3));
}

TEST(FixedAnsatz, WorkedExampleMatchesCircuit) {
    const auto sample = encode(worked_example());
    EXPECT_NEAR(phi_fixed_ansatz(sample), phi_circuit(worked_example()), 1e-10);
}

TEST(FixedAnsatz, AllZeroOddK) {
    EXPECT_NEAR(phi_fixed_ansatz(EncodedSample(4, 3, std::vector<std::uint8_t>(12, 0))), 1.0, 1e-12);
}

TEST(FixedAnsatz, StatevectorEquivalenceRandom) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> pick(1, 5);
    for (int t = 0; t < 250; ++t) {
        const auto sample = encode(sample_random_instance(pick(rng), pick(rng), rng, false));
        const auto a = run_circuit(build_circuit(decode(sample)), sample.n());
        const auto b = run_circuit(build_fixed_ansatz(sample), sample.n());
        ASSERT_LE(max_elementwise_deviation(a, b), 1e-10);
    }
}

TEST(OddK, CountsAndPreservationN2) {
    const ForrelationInstance inst(2, {Fn({1, 2}), Fn({1})});
    const auto ext = oddk_extend(inst);
    EXPECT_TRUE(ext.modified);
    EXPECT_FALSE(ext.ancilla_added);
    EXPECT_EQ(ext.instance.k(), 2 + 4 * 1 - 1);
    EXPECT_NEAR(phi_circuit(ext.instance), phi_circuit(inst), 1e-10);
    EXPECT_NEAR(phi_circuit(ext.instance), 0.5, 1e-12);
}

TEST(OddK, AppendedPatternN4) {
    const ForrelationInstance inst(4, {Fn({1, 2, 3}), Fn({4})});
    const auto ext = oddk_extend(inst);
    ASSERT_EQ(ext.instance.k(), 2 + 7);
    int two_bit = 0, constant = 0;
    for (int i = 2; i < ext.instance.k(); ++i) {
        const auto& f = ext.instance.functions()[static_cast<std::size_t>(i)];
        two_bit += f.bits().size() == 2;
        constant += f.is_constant();
    }
    EXPECT_EQ(two_bit, 6);
    EXPECT_EQ(constant, 1);
    EXPECT_EQ(ext.instance.functions()[2].bits(), (std::vector<int>{1, 2}));
    EXPECT_TRUE(ext.instance.functions()[5].is_constant());
    EXPECT_EQ(ext.instance.functions()[6].bits(), (std::vector<int>{3, 4}));
    EXPECT_NEAR(phi_circuit(ext.instance), phi_circuit(inst), 1e-10);
}

TEST(OddK, AlreadyOddIsUnmodified) {
    const auto inst = worked_example();
    const auto ext = oddk_extend(inst);
    EXPECT_FALSE(ext.modified);
    EXPECT_EQ(ext.instance, inst);
}

TEST(OddK, PreservesPhiForEvenN) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 200; ++t) {
        const int n = (t % 2 == 0) ? 2 : 4;
        const int k = (t % 4 < 2) ? 2 : 4;
        const auto inst = sample_random_instance(n, k, rng, false);
        const auto ext = oddk_extend(inst);
        ASSERT_EQ(ext.instance.k(), k + 4 * ((n + 1) / 2) - 1);
        ASSERT_EQ(ext.instance.k() % 2, 1);
        ASSERT_LE(std::abs(phi_circuit(ext.instance) - phi_circuit(inst)), 1e-10);
        if (ext.instance.n() * ext.instance.k() <= kMaxBruteForceBits) {
            ASSERT_LE(std::abs(phi_bruteforce(ext.instance) - phi_bruteforce(inst)), 1e-10);
        }
    }
}

// With an ancilla the construction gives Phi / sqrt(2); the ancilla reaches
// the gadget in |+>. This pins the actual behaviour for odd n.
TEST(OddK, OddNAncillaScalesPhi) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 100; ++t) {
        const auto inst = sample_random_instance(3, (t % 2) ? 2 : 4, rng, false);
        const auto ext = oddk_extend(inst);
        ASSERT_TRUE(ext.ancilla_added);
        ASSERT_EQ(ext.instance.n(), 4);
        ASSERT_EQ(ext.instance.k(), inst.k() + 7);
        ASSERT_LE(std::abs(phi_circuit(ext.instance) - phi_circuit(inst) / std::sqrt(2.0)), 1e-10);
    }
}

TEST(OddK, RequiresTwoQubits) {
    EXPECT_THROW(oddk_extend(ForrelationInstance(1, {Fn(), Fn()})), ValidationError);
}

TEST(OddK, GadgetOperatorIdentity) {
    const std::vector<Gate> rhs{Gate::hadamard_all(), Gate::swap(1, 2)};
    EXPECT_LE(max_deviation_up_to_global_phase(unitary_of(swap_gadget(), 2), unitary_of(rhs, 2)), 1e-12);
}
