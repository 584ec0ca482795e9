// datagen.hpp
// Labeled k-Forrelation datasets: the constructive training pair, promise-
// filtered random instances, and a JSON Lines file format.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "kforr/classify.hpp"
#include "kforr/error.hpp"
#include "kforr/forrelation.hpp"
#include "kforr/qstate.hpp"

namespace kforr {

enum class Provenance { Constructive, RejectionSampled };

inline const char* to_string(Provenance p) noexcept {
    return p == Provenance::Constructive ? "constructive" : "rejection_sampled";
}

inline Provenance provenance_from_string(const std::string& s) {
    if (s == "constructive") return Provenance::Constructive;
    if (s == "rejection_sampled") return Provenance::RejectionSampled;
    throw ValidationError("unknown provenance '" + s + "'");
}

struct LabeledSample {
    EncodedSample sample;
    Label label;
    double phi;
    Provenance provenance;

    bool operator==(const LabeledSample&) const = default;
};

// Does phi satisfy the promise inequality for `label`?
inline bool satisfies_promise(Label label, double phi) noexcept {
    return label == Label::Positive ? phi >= kPositiveThreshold : std::abs(phi) <= kNegativeThreshold;
}

struct DatasetSpec {
    int n = 3;
    int k = 3;
    int count_pos = 0;
    int count_neg = 0;
    std::uint64_t seed = 0;
    long long max_rejection_tries = 100000;

    void validate() const {
        if (k < 3 || k % 2 == 0) throw ValidationError("k must be odd and >= 3");
        if (n < 3) throw ValidationError("n must be >= 3 (one function needs exactly three bits)");
        if (n > kMaxQubits) throw CapacityError("n exceeds the simulator cap");
        if (count_pos < 0 || count_neg < 0) throw ValidationError("sample counts must be >= 0");
        if (max_rejection_tries < 0) throw ValidationError("max_rejection_tries must be >= 0");
    }

    bool operator==(const DatasetSpec&) const = default;
};

namespace detail {

inline void check_odd_k(int k) {
    if (k < 3 || k % 2 == 0) throw ValidationError("k must be odd and >= 3");
}

inline void check_index(int idx, int n) {
    if (idx < 1 || idx > n)
        throw ValidationError("bit index " + std::to_string(idx) + " outside [1, " + std::to_string(n) + "]");
}

}  // namespace detail

// f_1 = f_3 = (-1)^{x_i x_j x_l}, all other functions constant; U_F|0> = |0>.
inline LabeledSample make_positive_sample(int n, int k, int i, int j, int l) {
    detail::check_odd_k(k);
    if (n < 3) throw ValidationError("positive sample needs n >= 3");
    for (int idx : {i, j, l}) detail::check_index(idx, n);
    if (i == j || j == l || i == l) throw ValidationError("i, j, l must be distinct");

    std::vector<BooleanFunctionSpec> functions(static_cast<std::size_t>(k));
    functions[0] = BooleanFunctionSpec({i, j, l});
    functions[2] = functions[0];
    const ForrelationInstance inst(n, std::move(functions));

    const StateVector out = run_circuit(build_circuit(inst), n);
    if (std::abs(out.probability(0) - 1.0) > kExactTolerance)
        throw InvariantViolation("positive construction does not return to |0^n>");
    return LabeledSample{encode(inst), Label::Positive, out[0].real() + 0.0, Provenance::Constructive};
}

// f_1 = (-1)^{x_j}, f_2 = product of three_bits, rest constant;
// U_F|0> = |2^{j-1}> up to a global phase.
inline LabeledSample make_negative_sample(int n, int k, int j, std::array<int, 3> three_bits) {
    detail::check_odd_k(k);
    detail::check_index(j, n);
    for (int idx : three_bits) detail::check_index(idx, n);
    std::vector<BooleanFunctionSpec> functions(static_cast<std::size_t>(k));
    functions[0] = BooleanFunctionSpec({j});
    functions[1] = BooleanFunctionSpec({three_bits[0], three_bits[1], three_bits[2]});
    if (functions[1].bits().size() != 3) throw ValidationError("three_bits must be distinct");
    const ForrelationInstance inst(n, std::move(functions));

    const StateVector out = run_circuit(build_circuit(inst), n);
    const BasisIndex z = BasisIndex{1} << (j - 1);
    if (std::abs(out.probability(z) - 1.0) > kExactTolerance)
        throw InvariantViolation("negative construction does not reach |2^{j-1}>");
    return LabeledSample{encode(inst), Label::Negative, out[0].real() + 0.0, Provenance::Constructive};
}

// Each function uniform over {constant} and all subsets of size 1..3; the
// tuple is redrawn until some function has exactly three bits (unless
// require_three_bit is false).
template <class Rng>
ForrelationInstance sample_random_instance(int n, int k, Rng& rng, bool require_three_bit = true) {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (n < 1) throw ValidationError("n must be >= 1");
    if (require_three_bit && n < 3) throw ValidationError("no three-bit function exists for n < 3");

    const auto forms = fixed_ansatz_slots(n);
    std::uniform_int_distribution<std::size_t> pick(0, forms.size());  // 0 = constant
    constexpr int kMaxRedraws = 100000;
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        std::vector<BooleanFunctionSpec> functions;
        functions.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const std::size_t f = pick(rng);
            functions.push_back(f == 0 ? BooleanFunctionSpec::constant() : BooleanFunctionSpec(forms[f - 1]));
        }
        ForrelationInstance inst(n, std::move(functions));
        if (!require_three_bit || inst.promise_complete_form()) return inst;
    }
    throw GenerationError("could not draw an instance with a three-bit function");
}

struct GenerationReport {
    long long tries = 0;
    int accepted_pos = 0;
    int accepted_neg = 0;
    int fallback_pos = 0;
    int fallback_neg = 0;
    long long in_gap = 0;  // candidates with 1/100 < |Phi| and Phi < 3/5
    double phi_min = 0.0;
    double phi_max = 0.0;
    double phi_mean = 0.0;
    std::array<long long, 10> phi_histogram{};  // 10 equal bins over [-1, 1]
    std::string sampling =
        "uniform over {constant} and subsets of size 1..3 per function; redrawn until one function has 3 bits";

    double acceptance_rate_pos() const noexcept {
        return tries ? static_cast<double>(accepted_pos) / static_cast<double>(tries) : 0.0;
    }
    double acceptance_rate_neg() const noexcept {
        return tries ? static_cast<double>(accepted_neg) / static_cast<double>(tries) : 0.0;
    }
};

struct Dataset {
    DatasetSpec spec;
    std::vector<LabeledSample> samples;
    GenerationReport report;
};

struct GenerationOptions {
    unsigned threads = 1;
    std::size_t batch_size = 512;
};

// KFORR_THREADS if set and positive, else hardware concurrency.
inline unsigned threads_from_env() {
    if (const char* v = std::getenv("KFORR_THREADS")) {
        const long t = std::strtol(v, nullptr, 10);
        if (t > 0) return static_cast<unsigned>(t);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

// Candidate c always sees the same stream, whichever thread evaluates it.
inline std::mt19937_64 candidate_rng(std::uint64_t seed, std::uint64_t candidate) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(candidate), static_cast<std::uint32_t>(candidate >> 32)};
    return std::mt19937_64(seq);
}

struct Candidate {
    std::optional<ForrelationInstance> instance;
    double phi = 0.0;
};

inline void evaluate_candidates(const DatasetSpec& spec, long long first, std::vector<Candidate>& out,
                                unsigned threads) {
    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < out.size(); i += step) {
            auto rng = candidate_rng(spec.seed, static_cast<std::uint64_t>(first) + i);
            out[i].instance = sample_random_instance(spec.n, spec.k, rng);
            out[i].phi = phi_circuit(*out[i].instance).value() + 0.0;
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(out.size())));
    if (threads == 1) {
        work(0, 1);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
}

}  // namespace detail

// Rejection-samples random instances and keeps those inside the promise.
// Classes still short after max_rejection_tries are filled with distinct
// constructive samples, and the report says how many.
inline Dataset generate_dataset(const DatasetSpec& spec, const GenerationOptions& opts = {}) {
    spec.validate();
    Dataset ds{spec, {}, {}};
    auto& rep = ds.report;
    std::vector<LabeledSample> fallback;

    double phi_sum = 0.0;
    long long candidate = 0;
    while (candidate < spec.max_rejection_tries &&
           (rep.accepted_pos < spec.count_pos || rep.accepted_neg < spec.count_neg)) {
        const auto batch = static_cast<std::size_t>(
            std::min<long long>(static_cast<long long>(opts.batch_size), spec.max_rejection_tries - candidate));
        std::vector<detail::Candidate> cands(batch);
        detail::evaluate_candidates(spec, candidate, cands, opts.threads);

        for (const auto& c : cands) {
            if (rep.accepted_pos >= spec.count_pos && rep.accepted_neg >= spec.count_neg) break;
            ++candidate;
            const double phi = c.phi;
            rep.phi_min = rep.tries == 0 ? phi : std::min(rep.phi_min, phi);
            rep.phi_max = rep.tries == 0 ? phi : std::max(rep.phi_max, phi);
            ++rep.tries;
            phi_sum += phi;
            const auto bin = std::clamp(static_cast<int>((phi + 1.0) / 0.2), 0, 9);
            ++rep.phi_histogram[static_cast<std::size_t>(bin)];

            if (phi >= kPositiveThreshold) {
                if (rep.accepted_pos < spec.count_pos) {
                    ++rep.accepted_pos;
                    ds.samples.push_back({encode(*c.instance), Label::Positive, phi, Provenance::RejectionSampled});
                }
            } else if (std::abs(phi) <= kNegativeThreshold) {
                if (rep.accepted_neg < spec.count_neg) {
                    ++rep.accepted_neg;
                    ds.samples.push_back({encode(*c.instance), Label::Negative, phi, Provenance::RejectionSampled});
                }
            } else {
                ++rep.in_gap;
            }
        }
    }
    rep.phi_mean = rep.tries ? phi_sum / static_cast<double>(rep.tries) : 0.0;

    const int n = spec.n;
    for (int i = 1; i <= n && rep.accepted_pos + rep.fallback_pos < spec.count_pos; ++i)
        for (int j = i + 1; j <= n && rep.accepted_pos + rep.fallback_pos < spec.count_pos; ++j)
            for (int l = j + 1; l <= n && rep.accepted_pos + rep.fallback_pos < spec.count_pos; ++l) {
                ds.samples.push_back(make_positive_sample(n, spec.k, i, j, l));
                ++rep.fallback_pos;
            }
    if (rep.accepted_pos + rep.fallback_pos < spec.count_pos)
        throw GenerationError("not enough distinct constructive positive samples for n = " + std::to_string(n));

    for (int j = 1; j <= n && rep.accepted_neg + rep.fallback_neg < spec.count_neg; ++j)
        for (int a = 1; a <= n && rep.accepted_neg + rep.fallback_neg < spec.count_neg; ++a)
            for (int b = a + 1; b <= n && rep.accepted_neg + rep.fallback_neg < spec.count_neg; ++b)
                for (int c = b + 1; c <= n && rep.accepted_neg + rep.fallback_neg < spec.count_neg; ++c) {
                    ds.samples.push_back(make_negative_sample(n, spec.k, j, {a, b, c}));
                    ++rep.fallback_neg;
                }
    if (rep.accepted_neg + rep.fallback_neg < spec.count_neg)
        throw GenerationError("not enough distinct constructive negative samples for n = " + std::to_string(n));

    return ds;
}

// ---------------------------------------------------------------------------
// File format (JSON Lines)
//
//   {"dataset_spec":{"n":3,"k":3,"count_pos":5,"count_neg":5,"seed":7,"max_rejection_tries":100000}}
//   {"n":3,"k":3,"bits":"111000111","label":1,"phi":1,"provenance":"constructive"}
//
// The header line is optional on read. phi is printed with 17 significant
// digits.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double17(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf.data(), end);
}

}  // namespace detail

inline std::string format_spec_line(const DatasetSpec& s) {
    std::ostringstream os;
    os << R"({"dataset_spec":{"n":)" << s.n << R"(,"k":)" << s.k << R"(,"count_pos":)" << s.count_pos
       << R"(,"count_neg":)" << s.count_neg << R"(,"seed":)" << s.seed << R"(,"max_rejection_tries":)"
       << s.max_rejection_tries << "}}";
    return os.str();
}

inline std::string format_sample_line(const LabeledSample& s) {
    std::ostringstream os;
    os << R"({"n":)" << s.sample.n() << R"(,"k":)" << s.sample.k() << R"(,"bits":")" << s.sample.to_string()
       << R"(","label":)" << to_int(s.label) << R"(,"phi":)" << detail::format_double17(s.phi)
       << R"(,"provenance":")" << to_string(s.provenance) << "\"}";
    return os.str();
}

inline std::string format_dataset(const std::optional<DatasetSpec>& spec, const std::vector<LabeledSample>& samples) {
    std::string out;
    if (spec) out += format_spec_line(*spec) + "\n";
    for (const auto& s : samples) out += format_sample_line(s) + "\n";
    return out;
}

inline void write_dataset(const std::string& path, const std::optional<DatasetSpec>& spec,
                          const std::vector<LabeledSample>& samples) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << format_dataset(spec, samples);
    if (!f) throw Error("write to '" + path + "' failed");
}

struct DatasetFile {
    std::optional<DatasetSpec> spec;
    std::vector<LabeledSample> samples;
};

inline DatasetFile parse_dataset(std::istream& in) {
    DatasetFile out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            if (!j.is_object()) throw ValidationError("record must be a JSON object");
            if (j.contains("dataset_spec")) {
                if (lineno != 1 || out.spec) throw ValidationError("dataset_spec must be the first line");
                const auto& h = j.at("dataset_spec");
                DatasetSpec s;
                s.n = h.at("n").get<int>();
                s.k = h.at("k").get<int>();
                s.count_pos = h.at("count_pos").get<int>();
                s.count_neg = h.at("count_neg").get<int>();
                s.seed = h.at("seed").get<std::uint64_t>();
                s.max_rejection_tries = h.at("max_rejection_tries").get<long long>();
                out.spec = s;
                continue;
            }
            const int n = j.at("n").get<int>();
            const int k = j.at("k").get<int>();
            auto sample = EncodedSample::from_string(n, k, j.at("bits").get<std::string>());
            const int label = j.at("label").get<int>();
            if (label != 1 && label != -1) throw ValidationError("label must be 1 or -1");
            out.samples.push_back(LabeledSample{std::move(sample), static_cast<Label>(label), j.at("phi").get<double>(),
                                                provenance_from_string(j.at("provenance").get<std::string>())});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(lineno, e.what());
        } catch (const ValidationError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return out;
}

inline DatasetFile read_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "'");
    return parse_dataset(f);
}

}  // namespace kforr
