// cli.hpp
// Batch commands behind the `kforr` executable. Kept in a header so tests can
// drive run_cli() in-process.
//
// Exit codes: 0 success, 1 verification failure, 2 runtime/data error,
// 64 usage error.

#pragma once

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kforr/classify.hpp"
#include "kforr/datagen.hpp"
#include "kforr/forrelation.hpp"
#include "kforr/verify.hpp"

namespace kforr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitUsage = 64;

enum class Command { Gen, Classify, Verify, Bench };
enum class ClassifierMode { Vqc, Qsvm };

struct RunConfig {
    Command command = Command::Verify;
    int n = 3;
    int k = 3;
    int count_pos = 0;
    int count_neg = 0;
    long long max_tries = 100000;
    std::optional<std::size_t> shots;
    std::uint64_t seed = 0;
    std::optional<double> bias;
    double box_c = kDefaultBoxC;
    std::string input;
    std::string output;
    ClassifierMode mode = ClassifierMode::Vqc;
    int verbosity = 0;
    // verify
    int random_cases = 200;
    // bench
    int min_n = 4;
    int max_n = 20;
    int max_ansatz_n = 14;
    int reps = 3;
};

namespace detail {

inline std::string json_double(double v) { return kforr::detail::format_double17(v); }

// Per-sample shot seed; independent of evaluation order.
inline std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), 0x6b666f72u};
    std::uint64_t out = 0;
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    return out;
}

}  // namespace detail

inline int cmd_gen(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    DatasetSpec spec{cfg.n, cfg.k, cfg.count_pos, cfg.count_neg, cfg.seed, cfg.max_tries};
    try {
        spec.validate();
    } catch (const Error& e) {
        err << "kforr gen: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        const Dataset ds = generate_dataset(spec, GenerationOptions{threads_from_env()});
        write_dataset(cfg.output, ds.spec, ds.samples);
        const auto& r = ds.report;
        out << R"({"report":{"samples":)" << ds.samples.size() << R"(,"tries":)" << r.tries
            << R"(,"accepted_pos":)" << r.accepted_pos << R"(,"accepted_neg":)" << r.accepted_neg
            << R"(,"fallback_pos":)" << r.fallback_pos << R"(,"fallback_neg":)" << r.fallback_neg
            << R"(,"in_gap":)" << r.in_gap << R"(,"acceptance_rate_pos":)" << detail::json_double(r.acceptance_rate_pos())
            << R"(,"acceptance_rate_neg":)" << detail::json_double(r.acceptance_rate_neg())
            << R"(,"phi_min":)" << detail::json_double(r.phi_min) << R"(,"phi_max":)" << detail::json_double(r.phi_max)
            << R"(,"phi_mean":)" << detail::json_double(r.phi_mean) << R"(,"phi_histogram":[)";
        for (std::size_t i = 0; i < r.phi_histogram.size(); ++i) out << (i ? "," : "") << r.phi_histogram[i];
        out << R"(],"sampling":")" << r.sampling << R"(","output":)" << nlohmann::json(cfg.output).dump() << "}}\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "kforr gen: " << e.what() << "\n";
        return kExitRuntime;
    }
}

inline int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const DatasetFile file = read_dataset(cfg.input);
        if (file.samples.empty() && !file.spec) {
            out << R"({"summary":{"count":0,"correct":0,"accuracy":null}})" << "\n";
            return kExitOk;
        }
        const int n = file.spec ? file.spec->n : file.samples.front().sample.n();
        const int k = file.spec ? file.spec->k : file.samples.front().sample.k();
        for (const auto& s : file.samples)
            if (s.sample.n() != n || s.sample.k() != k) throw ValidationError("dataset mixes different (n, k)");

        auto mode_for = [&](std::size_t i) -> EvalMode {
            if (cfg.shots) return SampledMode{*cfg.shots, detail::sample_seed(cfg.seed, i)};
            return ExactMode{};
        };

        std::optional<DualSolution> sol;
        double bias = 0.0;
        if (cfg.mode == ClassifierMode::Qsvm) {
            const auto plus = make_positive_sample(n, k, 1, 2, 3);
            const auto minus = make_negative_sample(n, k, 1, {1, 2, 3});
            sol = qsvm_train(plus.sample, minus.sample, cfg.box_c);
            if (cfg.bias) sol->bias = *cfg.bias;
            bias = sol->bias;
        } else {
            bias = cfg.bias ? VqcModel::with_bias(*cfg.bias).bias : VqcModel::default_for_forrelation().bias;
        }

        std::size_t correct = 0;
        for (std::size_t i = 0; i < file.samples.size(); ++i) {
            const auto& s = file.samples[i];
            Label predicted;
            double score;
            if (sol) {
                score = qsvm_decision_value(s.sample, *sol, mode_for(i));
                predicted = score > 0 ? Label::Positive : Label::Negative;
            } else {
                score = vqc_probability(s.sample, mode_for(i));
                predicted = score > (1.0 - bias) / 2 ? Label::Positive : Label::Negative;
            }
            correct += predicted == s.label;
            out << R"({"index":)" << i << R"(,"label":)" << to_int(s.label) << R"(,"predicted":)"
                << to_int(predicted) << R"(,"score":)" << detail::json_double(score) << "}\n";
        }
        const auto count = file.samples.size();
        out << R"({"summary":{"mode":")" << (sol ? "qsvm" : "vqc") << R"(","shots":)"
            << (cfg.shots ? std::to_string(*cfg.shots) : "null") << R"(,"bias":)" << detail::json_double(bias);
        if (sol) out << R"(,"alpha":)" << detail::json_double(sol->alpha);
        out << R"(,"count":)" << count << R"(,"correct":)" << correct << R"(,"accuracy":)"
            << (count ? detail::json_double(static_cast<double>(correct) / static_cast<double>(count)) : "null")
            << "}}\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "kforr classify: " << e.what() << "\n";
        return kExitRuntime;
    }
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err, double fault = 0.0) {
    VerifyOptions opt;
    opt.sweep_n = cfg.n;
    opt.sweep_k = cfg.k;
    opt.seed = cfg.seed;
    opt.random_cases = cfg.random_cases;
    opt.fault = fault;
    try {
        const auto results = run_verification(opt);
        bool ok = true;
        for (const auto& r : results) {
            ok = ok && r.pass;
            out << R"({"check":")" << r.name << R"(","pass":)" << (r.pass ? "true" : "false") << R"(,"cases":)"
                << r.cases << R"(,"max_deviation":)" << detail::json_double(r.max_deviation) << R"(,"tolerance":)"
                << detail::json_double(r.tolerance) << "}\n";
            if (!r.pass) err << "FAILED: " << r.name << "\n";
        }
        return ok ? kExitOk : kExitVerifyFailed;
    } catch (const Error& e) {
        err << "kforr verify: " << e.what() << "\n";
        return kExitRuntime;
    }
}

inline int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    using Clock = std::chrono::steady_clock;
    try {
        std::mt19937_64 rng(cfg.seed);
        for (int n = cfg.min_n; n <= cfg.max_n; ++n) {
            const auto inst = sample_random_instance(n, cfg.k, rng, n >= 3);
            const auto sample = encode(inst);
            auto time_ms = [&](auto&& fn) {
                double best = INFINITY;
                for (int r = 0; r < cfg.reps; ++r) {
                    const auto t0 = Clock::now();
                    fn();
                    best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
                }
                return best;
            };
            double phi = 0.0;
            const double circuit_ms = time_ms([&] { phi = phi_circuit(inst); });
            out << R"({"n":)" << n << R"(,"k":)" << cfg.k << R"(,"circuit_gates":)" << 2 * cfg.k + 1
                << R"(,"phi_circuit_ms":)" << detail::json_double(circuit_ms) << R"(,"ansatz_gates":)"
                << fixed_ansatz_parameter_count(n, cfg.k) << R"(,"phi_fixed_ansatz_ms":)";
            if (n <= cfg.max_ansatz_n)
                out << detail::json_double(time_ms([&] { phi = phi_fixed_ansatz(sample); }));
            else
                out << "null";
            out << R"(,"phi":)" << detail::json_double(phi) << "}\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "kforr bench: " << e.what() << "\n";
        return kExitRuntime;
    }
}

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    switch (cfg.command) {
        case Command::Gen: return cmd_gen(cfg, out, err);
        case Command::Classify: return cmd_classify(cfg, out, err);
        case Command::Verify: return cmd_verify(cfg, out, err);
        case Command::Bench: return cmd_bench(cfg, out, err);
    }
    return kExitUsage;
}

// Either a config to run, or an exit code plus the text to print (help or a
// usage error).
struct ParseOutcome {
    std::optional<RunConfig> config;
    int exit_code = kExitOk;
    std::string message;
};

inline ParseOutcome parse_args(int argc, const char* const* argv) {
    RunConfig cfg;
    CLI::App app{"k-Forrelation classification simulator", "kforr"};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", cfg.verbosity, "Increase verbosity");

    auto* gen = app.add_subcommand("gen", "Generate a labeled dataset");
    gen->add_option("--n", cfg.n, "Number of input bits / qubits")->required();
    gen->add_option("--k", cfg.k, "Number of Boolean functions (odd, >= 3)")->required();
    gen->add_option("--pos", cfg.count_pos, "Positive samples")->required()->check(CLI::NonNegativeNumber);
    gen->add_option("--neg", cfg.count_neg, "Negative samples")->required()->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", cfg.seed, "RNG seed");
    gen->add_option("--max-tries", cfg.max_tries, "Rejection-sampling budget")->check(CLI::NonNegativeNumber);
    gen->add_option("--out", cfg.output, "Output dataset path (.jsonl)")->required();

    auto* cls = app.add_subcommand("classify", "Classify a dataset and report accuracy");
    std::string mode = "vqc";
    std::size_t shots = 0;
    double bias = 0.0;
    cls->add_option("--in", cfg.input, "Dataset path")->required();
    cls->add_option("--mode", mode, "Classifier")->check(CLI::IsMember({"vqc", "qsvm"}));
    auto* shots_opt = cls->add_option("--shots", shots, "Use sampled mode with this many shots")->check(CLI::PositiveNumber);
    auto* bias_opt = cls->add_option("--bias", bias, "Override the decision bias");
    cls->add_option("--box-c", cfg.box_c, "QSVM box constraint C")->check(CLI::PositiveNumber);
    cls->add_option("--seed", cfg.seed, "Shot RNG seed");

    auto* ver = app.add_subcommand("verify", "Run the cross-module invariant suite");
    ver->add_option("--n", cfg.n, "n for the exhaustive oracle sweep")->check(CLI::Range(1, 3));
    ver->add_option("--k", cfg.k, "k for the exhaustive oracle sweep")->check(CLI::Range(1, 4));
    ver->add_option("--cases", cfg.random_cases, "Random cases per randomized check")->check(CLI::PositiveNumber);
    ver->add_option("--seed", cfg.seed, "RNG seed");

    auto* bench = app.add_subcommand("bench", "Time circuit and fixed-ansatz evaluation");
    bench->add_option("--min-n", cfg.min_n, "Smallest n")->check(CLI::Range(1, kMaxQubits));
    bench->add_option("--max-n", cfg.max_n, "Largest n")->check(CLI::Range(1, kMaxQubits));
    bench->add_option("--max-ansatz-n", cfg.max_ansatz_n, "Largest n for the fixed ansatz timing");
    bench->add_option("--k", cfg.k, "Number of functions")->check(CLI::PositiveNumber);
    bench->add_option("--reps", cfg.reps, "Repetitions (best time reported)")->check(CLI::PositiveNumber);
    bench->add_option("--seed", cfg.seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream os;
        const int code = app.exit(e, os, os);
        return ParseOutcome{std::nullopt, code == 0 ? kExitOk : kExitUsage, os.str()};
    }

    if (*gen) {
        cfg.command = Command::Gen;
    } else if (*cls) {
        cfg.command = Command::Classify;
        cfg.mode = mode == "qsvm" ? ClassifierMode::Qsvm : ClassifierMode::Vqc;
        if (*shots_opt) cfg.shots = shots;
        if (*bias_opt) {
            if (!(bias >= -1.0 && bias <= 1.0) && mode == "vqc")
                return ParseOutcome{std::nullopt, kExitUsage, "--bias must lie in [-1, 1]\n"};
            cfg.bias = bias;
        }
    } else if (*ver) {
        cfg.command = Command::Verify;
    } else {
        cfg.command = Command::Bench;
        if (cfg.min_n > cfg.max_n) return ParseOutcome{std::nullopt, kExitUsage, "--min-n must be <= --max-n\n"};
    }
    return ParseOutcome{cfg, kExitOk, {}};
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    auto parsed = parse_args(argc, argv);
    if (!parsed.config) {
        (parsed.exit_code == kExitOk ? out : err) << parsed.message;
        return parsed.exit_code;
    }
    return run(*parsed.config, out, err);
}

}  // namespace kforr::cli
