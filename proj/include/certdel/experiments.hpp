#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "certdel/common.hpp"
#include "certdel/linear_code.hpp"
#include "certdel/pke.hpp"
#include "certdel/protocol_enhanced.hpp"
#include "certdel/rng.hpp"
#include "certdel/stats.hpp"

namespace certdel {

enum class Strategy { HonestRead, HonestDelete, MeasureForge, BallPovm };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::HonestRead: return "honest-read";
        case Strategy::HonestDelete: return "honest-delete";
        case Strategy::MeasureForge: return "measure-forge";
        case Strategy::BallPovm: return "ball-povm";
    }
    return "?";
}

enum class CertificateKind { Quantum, Classical };

struct ExperimentConfig {
    std::string code_id = "bch-31-16-7";
    std::string pke_scheme = "toy-16";
    ErrorMode error_mode = ErrorMode::Bloch;
    std::size_t trials = 10'000;
    std::uint64_t seed = 1;
    Strategy strategy = Strategy::HonestRead;
    std::size_t workers = 1;
    bool force_correct_guess = false; // diagnostic: adversary/reader guesses beta
    CertificateKind certificate = CertificateKind::Quantum;
    std::optional<std::size_t> error_count; // decoy count override, <= code e
};

// A named probability estimate: value, binomial standard error, provenance.
struct Estimate {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline Estimate make_estimate(std::string name, std::size_t successes, std::size_t trials,
                              std::uint64_t seed) {
    const double v = static_cast<double>(successes) / static_cast<double>(trials);
    return Estimate{std::move(name), v, binomial_std_error(v, trials), trials, seed};
}

// Counts trials where `trial_fn(index, rng)` returns true. Per-trial child
// streams make the count independent of the worker split.
template <typename TrialFn>
std::size_t run_trials(std::size_t trials, std::size_t workers, std::uint64_t seed,
                       TrialFn&& trial_fn) {
    if (trials == 0) throw DomainError("run_trials: need at least one trial");
    workers = std::max<std::size_t>(1, std::min(workers, trials));
    if (workers == 1) {
        std::size_t count = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            Rng rng(stable_hash(seed, t));
            if (trial_fn(t, rng)) ++count;
        }
        return count;
    }
    std::vector<std::size_t> counts(workers, 0);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(trials, begin + chunk);
            std::size_t local = 0;
            for (std::size_t t = begin; t < end; ++t) {
                Rng rng(stable_hash(seed, t));
                if (trial_fn(t, rng)) ++local;
            }
            counts[w] = local;
        });
    }
    for (auto& th : pool) th.join();
    std::size_t total = 0;
    for (auto c : counts) total += c;
    return total;
}

struct TrialSetup {
    KeyPair keys;
    BitString message;
    CiphertextBundle bundle;
    AliceRecord record;
};

inline TrialSetup fresh_instance(const ExperimentConfig& cfg, const Code& code, Rng& rng) {
    KeyPair keys = keygen(cfg.pke_scheme, 128, rng);
    BitString message = BitString::random(scheme_plaintext_bits(cfg.pke_scheme), rng);
    auto [bundle, record] =
        encrypt_enhanced(keys.pk, message, code, cfg.error_mode, rng, cfg.error_count);
    return TrialSetup{std::move(keys), std::move(message), std::move(bundle), std::move(record)};
}

} // namespace detail

// Honest-reader success probability: fraction of trials where Bob's
// measure-decode-decrypt returns exactly the plaintext.
inline Estimate estimate_p_reading(const ExperimentConfig& cfg) {
    if (cfg.strategy != Strategy::HonestRead)
        throw StrategyUnavailable("estimate_p_reading: strategy must be honest-read");
    const Code code = make_code(cfg.code_id);
    const std::size_t hits = detail::run_trials(
        cfg.trials, cfg.workers, cfg.seed, [&](std::size_t, Rng& rng) {
            auto setup = detail::fresh_instance(cfg, code, rng);
            const std::optional<Basis> forced =
                cfg.force_correct_guess ? std::optional<Basis>(setup.record.global_basis)
                                        : std::nullopt;
            const auto result = bob_decrypt(setup.keys.sk, setup.bundle, code, rng, forced);
            return result.has_value() && *result == setup.message;
        });
    return detail::make_estimate("p_reading", hits, cfg.trials, cfg.seed);
}

// Joint statistics for a cheating strategy, one protocol instance per trial.
struct CheatStats {
    Estimate detection;     // Alice rejects the returned certificate
    Estimate read;          // adversary recovered the exact plaintext
    Estimate joint;         // read AND certificate accepted
};

inline CheatStats run_cheat_experiment(const ExperimentConfig& cfg) {
    if (cfg.strategy != Strategy::MeasureForge && cfg.strategy != Strategy::BallPovm)
        throw StrategyUnavailable("run_cheat_experiment: need a cheating strategy");
    const Code code = make_code(cfg.code_id);
    if (cfg.strategy == Strategy::BallPovm && code.n() > kDefaultDenseCap)
        throw StrategyUnavailable("ball-povm unavailable: code length exceeds dense cap");

    struct Counts {
        std::size_t detected = 0, read = 0, joint = 0;
    };
    // One pass over the trials, three counters, merged per worker.
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.trials));
    std::vector<Counts> by_worker(workers);
    const std::size_t chunk = (cfg.trials + workers - 1) / workers;
    auto body = [&](std::size_t begin, std::size_t end, Counts& out) {
        for (std::size_t t = begin; t < end; ++t) {
            Rng rng(stable_hash(cfg.seed, t));
            auto setup = detail::fresh_instance(cfg, code, rng);
            const Basis guess = cfg.force_correct_guess
                                    ? setup.record.global_basis
                                    : (rng.bit() ? Basis::hadamard() : Basis::computational());
            CheatOutcome outcome =
                cfg.strategy == Strategy::MeasureForge
                    ? cheat_measure_forge(setup.keys.sk, setup.bundle, code, rng, guess)
                    : cheat_ball_povm(setup.keys.sk, setup.bundle, code, guess, rng);
            const bool read = outcome.plaintext.has_value() && *outcome.plaintext == setup.message;
            const bool accepted = alice_verify_quantum(setup.record, outcome.returned, rng);
            if (!accepted) ++out.detected;
            if (read) ++out.read;
            if (read && accepted) ++out.joint;
        }
    };
    if (workers == 1) {
        body(0, cfg.trials, by_worker[0]);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                body(w * chunk, std::min(cfg.trials, (w + 1) * chunk), by_worker[w]);
            });
        for (auto& th : pool) th.join();
    }
    Counts total;
    for (const auto& c : by_worker) {
        total.detected += c.detected;
        total.read += c.read;
        total.joint += c.joint;
    }
    const std::string tag = to_string(cfg.strategy);
    return CheatStats{
        detail::make_estimate("p_dist(" + tag + ")", total.detected, cfg.trials, cfg.seed),
        detail::make_estimate("p_read(" + tag + ")", total.read, cfg.trials, cfg.seed),
        detail::make_estimate("p_joint(" + tag + ")", total.joint, cfg.trials, cfg.seed)};
}

// Detection probability against the configured cheating strategy.
inline Estimate estimate_p_dist(const ExperimentConfig& cfg) {
    return run_cheat_experiment(cfg).detection;
}

// Honest-deleter acceptance (not-false-positive probability).
inline Estimate estimate_p_nfp(const ExperimentConfig& cfg) {
    if (cfg.strategy != Strategy::HonestDelete)
        throw StrategyUnavailable("estimate_p_nfp: strategy must be honest-delete");
    const Code code = make_code(cfg.code_id);
    const std::size_t hits = detail::run_trials(
        cfg.trials, cfg.workers, cfg.seed, [&](std::size_t, Rng& rng) {
            auto setup = detail::fresh_instance(cfg, code, rng);
            if (cfg.certificate == CertificateKind::Quantum) {
                ReturnedState returned = bob_delete_quantum(setup.bundle);
                return alice_verify_quantum(setup.record, returned, rng);
            }
            const ClassicalChallenge challenge = make_classical_challenge(setup.record, rng);
            const BitString cert = bob_answer_challenge(setup.bundle, challenge, rng);
            return alice_verify_classical(setup.record, cert).accepted;
        });
    return detail::make_estimate("p_nfp", hits, cfg.trials, cfg.seed);
}

// Baseline: acceptance rate of a fabricated uniformly random classical
// certificate (no measurement at all).
inline Estimate estimate_random_cert_acceptance(const ExperimentConfig& cfg) {
    const Code code = make_code(cfg.code_id);
    const std::size_t hits = detail::run_trials(
        cfg.trials, cfg.workers, cfg.seed, [&](std::size_t, Rng& rng) {
            auto setup = detail::fresh_instance(cfg, code, rng);
            const BitString fake = BitString::random(code.n(), rng);
            return alice_verify_classical(setup.record, fake).accepted;
        });
    return detail::make_estimate("p_random_cert", hits, cfg.trials, cfg.seed);
}

struct ForgePoint {
    std::string code_id;
    std::size_t decoys = 0;
    Estimate acceptance;
};

struct ForgeCurve {
    std::vector<ForgePoint> points;
    double log2_slope = 0.0; // least-squares slope of log2(acceptance) vs e
};

// Certificate acceptance after a full measurement in the correct basis, per
// decoy count, across a family of codes.
inline ForgeCurve estimate_forge_curve(const std::vector<std::string>& code_ids,
                                       std::size_t trials, std::uint64_t seed,
                                       ErrorMode mode = ErrorMode::Bloch,
                                       std::size_t workers = 1) {
    ForgeCurve curve;
    for (std::size_t idx = 0; idx < code_ids.size(); ++idx) {
        ExperimentConfig cfg;
        cfg.code_id = code_ids[idx];
        const Code code = make_code(cfg.code_id);
        cfg.pke_scheme = "toy-" + std::to_string(code.k());
        cfg.error_mode = mode;
        cfg.trials = trials;
        cfg.seed = stable_hash(seed, idx);
        cfg.strategy = Strategy::MeasureForge;
        cfg.workers = workers;
        cfg.force_correct_guess = true;
        const CheatStats stats = run_cheat_experiment(cfg);
        Estimate acceptance = stats.detection;
        acceptance.name = "forge_acceptance(e=" + std::to_string(code.e()) + ")";
        acceptance.value = 1.0 - acceptance.value; // detection -> acceptance
        curve.points.push_back(ForgePoint{cfg.code_id, code.e(), std::move(acceptance)});
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : curve.points) {
        const double x = static_cast<double>(p.decoys);
        const double y = std::log2(p.acceptance.value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const auto m = static_cast<double>(curve.points.size());
    const double denom = m * sxx - sx * sx;
    curve.log2_slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    return curve;
}

struct SealBounds {
    double p_dist_bound = 0.0;
    double p_nfp_bound = 0.0;
    bool over_one = false; // raw formula value exceeded 1; reported unclamped
};

// Closed-form reference bounds as functions of the reading probability p and
// the message bit count M.
inline SealBounds seal_bounds(double p, double message_bits) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("seal_bounds: p outside [0,1]");
    if (!(message_bits >= 2.0)) throw DomainError("seal_bounds: M must be >= 2");
    SealBounds out;
    out.p_dist_bound = 0.5 + 0.25 * (2.0 * std::sqrt(1.0 - p) + 1.0 - p);
    out.p_nfp_bound = 1.0 - p * p - (1.0 - p) * (1.0 - p) / (message_bits - 1.0);
    out.over_one = out.p_dist_bound > 1.0 || out.p_nfp_bound > 1.0;
    return out;
}

struct Table1Config {
    std::size_t trials = 10'000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    ErrorMode error_mode = ErrorMode::Bloch;
    std::string reading_code = "bch-31-16-7";
    std::string reading_pke = "toy-16";
    std::string povm_code = "hamming-7-4-3";
    std::string povm_pke = "toy-4";
    double bound_p = 0.5;
    double bound_message_bits = 1e6;
};

struct Table1Row {
    std::string scheme;
    double p_reading = 0.0;
    double p_dist = 0.0;
    std::string p_dist_strategy;
    double p_nfp = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

struct Table1Report {
    std::vector<Table1Row> rows;
    std::vector<std::string> notes;
    Estimate p_dist_measure_forge; // secondary adversary, reported in notes
};

namespace detail {

inline std::string format_prob(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace detail

// Measured metrics for this construction next to the closed-form reference
// bounds, in the shape of the published comparison table.
inline Table1Report table1_report(const Table1Config& cfg) {
    Table1Report report;

    ExperimentConfig reading;
    reading.code_id = cfg.reading_code;
    reading.pke_scheme = cfg.reading_pke;
    reading.error_mode = cfg.error_mode;
    reading.trials = cfg.trials;
    reading.seed = stable_hash(cfg.seed, 1);
    reading.strategy = Strategy::HonestRead;
    reading.workers = cfg.workers;
    const Estimate p_reading = estimate_p_reading(reading);

    ExperimentConfig povm = reading;
    povm.code_id = cfg.povm_code;
    povm.pke_scheme = cfg.povm_pke;
    povm.seed = stable_hash(cfg.seed, 2);
    povm.strategy = Strategy::BallPovm;
    const Estimate p_dist = estimate_p_dist(povm);

    ExperimentConfig forge = reading;
    forge.seed = stable_hash(cfg.seed, 3);
    forge.strategy = Strategy::MeasureForge;
    report.p_dist_measure_forge = estimate_p_dist(forge);

    ExperimentConfig nfp = reading;
    nfp.seed = stable_hash(cfg.seed, 4);
    nfp.strategy = Strategy::HonestDelete;
    const Estimate p_nfp = estimate_p_nfp(nfp);

    const SealBounds bounds = seal_bounds(cfg.bound_p, cfg.bound_message_bits);

    report.rows.push_back(Table1Row{"ours-measured", p_reading.value, p_dist.value,
                                    to_string(Strategy::BallPovm), p_nfp.value, cfg.trials,
                                    cfg.seed});
    report.rows.push_back(Table1Row{"upper-bound", cfg.bound_p, bounds.p_dist_bound,
                                    "formula", bounds.p_nfp_bound, 0, cfg.seed});

    report.notes.push_back("p_nfp is measured honest-deleter acceptance; this construction "
                           "verifies honest certificates with probability 1, so the measured "
                           "value is 1.0 even though the published comparison lists 0.5.");
    report.notes.push_back("p_dist for 'ours-measured' names its adversary; the measure-forge "
                           "adversary on " + cfg.reading_code + " is detected with probability " +
                           detail::format_prob(report.p_dist_measure_forge.value) + ".");
    report.notes.push_back("the ball-projector p_dist runs on " + cfg.povm_code +
                           " (dense simulation); at that short block length a wrong-guess "
                           "projection retains the sampled ball's mass, which shaves a few "
                           "hundredths off the ideal 0.5 detection rate.");
    report.notes.push_back(std::string("error mode: ") + to_string(cfg.error_mode));
    report.notes.push_back("bound row evaluates the closed forms at p=" +
                           detail::format_prob(cfg.bound_p) + ", M=" +
                           std::to_string(static_cast<long long>(cfg.bound_message_bits)) + ".");
    return report;
}

// Fixed column order; identical seeds give byte-identical text.
inline std::string table1_to_csv(const Table1Report& report) {
    std::string csv = std::string("# ") + kVersionString + "\n";
    csv += "scheme,p_reading,p_dist,p_nfp,trials,seed\n";
    for (const auto& row : report.rows) {
        csv += row.scheme + "," + detail::format_prob(row.p_reading) + "," +
               detail::format_prob(row.p_dist) + "," + detail::format_prob(row.p_nfp) + "," +
               std::to_string(row.trials) + "," + std::to_string(row.seed) + "\n";
    }
    return csv;
}

} // namespace certdel
