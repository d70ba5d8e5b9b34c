#pragma once

#include "plaudit/assorters.hpp"
#include "plaudit/errors.hpp"
#include "plaudit/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace plaudit {

/// Parameters of the sequential risk calculation.
struct RiskParams {
    double risk_limit = 0.05;  // alpha
    double g_shift = 0.1;      // Kaplan-Kolmogorov shrinkage g
    double t_null = 0.5;       // null hypothesis mean
    long long population_size = 0;  // N, the number of cast ballots
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for an independent stream, e.g. one simulation replication.
/// Pure function of (seed, index), so parallel schedules cannot change
/// which stream a replication gets.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Uniform draw in [0, n). Rejection sampling on the raw 64-bit stream;
/// std::uniform_int_distribution is not reproducible across standard
/// library implementations, this is.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw PreconditionError("bounded_rand: empty range");
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

template <typename T>
void fisher_yates(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i)
        std::swap(items[i - 1], items[bounded_rand(rng, i)]);
}

/// Running Kaplan-Kolmogorov martingale for sampling without replacement
/// from a nonnegative population of N values, testing the null that the
/// population mean is at most t. The reported p-value is the inverse of
/// the running maximum of the product
///   prod_j (x_j + g) / m_j,   m_j = (N(t+g) - S_j) / (N - j + 1),
/// where S_j is the sum of the shifted samples before draw j. Tracking the
/// maximum makes p_value() nonincreasing, hence valid at every sample size
/// (anytime valid). Any m_j <= 0 means even an all-zero remainder would
/// push the population mean above t, so the null is impossible and p = 0.
class KKMartingale {
public:
    KKMartingale(long long population, double t_null, double g_shift)
        : n_(population), t_(t_null), g_(g_shift) {
        if (population < 1) throw PreconditionError("population size must be >= 1");
        if (g_shift < 0) throw DomainError("g must be nonnegative");
    }

    void update(double x) {
        if (x < 0) throw DomainError("negative sample value");
        if (j_ >= n_) throw PreconditionError("drew more samples than the population holds");
        ++j_;
        if (impossible_) return;
        double m = (static_cast<double>(n_) * (t_ + g_) - shifted_sum_) /
                   static_cast<double>(n_ - j_ + 1);
        if (m <= 0) {
            impossible_ = true;
            return;
        }
        log_product_ += std::log(x + g_) - std::log(m);
        max_log_product_ = std::max(max_log_product_, log_product_);
        shifted_sum_ += x + g_;
    }

    double p_value() const {
        if (impossible_) return 0.0;
        if (max_log_product_ <= 0) return 1.0;
        return std::min(1.0, std::exp(-max_log_product_));
    }

    long long samples_seen() const { return j_; }

private:
    long long n_;
    double t_;
    double g_;
    long long j_ = 0;
    double shifted_sum_ = 0.0;
    double log_product_ = 0.0;
    double max_log_product_ = -std::numeric_limits<double>::infinity();
    bool impossible_ = false;
};

/// One-shot Kaplan-Kolmogorov p-value for a sample prefix.
inline double kk_pvalue(const std::vector<double>& samples, long long population,
                        double t_null = 0.5, double g_shift = 0.1) {
    if (static_cast<long long>(samples.size()) > population)
        throw PreconditionError("more samples than the population holds");
    KKMartingale kk(population, t_null, g_shift);
    for (double x : samples) kk.update(x);
    return kk.p_value();
}

/// Progress of one assertion through an audit.
struct AssertionAuditState {
    std::string label;
    std::vector<double> samples;  // assorter values in draw order
    double p_value = 1.0;
    bool certified = false;
    long long certified_after = -1;  // ballots examined at certification

    bool operator==(const AssertionAuditState&) const = default;
};

struct AuditRoundRecord {
    int round = 0;
    std::vector<std::string> drawn_ids;
    std::vector<double> p_values;  // parallel to the assertion list

    bool operator==(const AuditRoundRecord&) const = default;
};

enum class AuditOutcome { certified, full_count };

inline const char* to_string(AuditOutcome o) {
    return o == AuditOutcome::certified ? "certified" : "full_count";
}

struct AuditResult {
    AuditOutcome outcome = AuditOutcome::full_count;
    std::vector<AssertionAuditState> assertions;
    std::vector<AuditRoundRecord> rounds;
    long long ballots_examined = 0;
    std::uint64_t seed = 0;
};

/// Runs a ballot-polling audit: draws ballots without replacement in
/// rounds of `round_size` (a Fisher-Yates permutation of the whole list,
/// consumed as a prefix), updates every open assertion's martingale, and
/// certifies an assertion once its p-value reaches the risk limit.
/// Certified assertions stop consuming draws. The audit certifies when
/// every assertion has, and falls back to a full count when the ballots
/// (or `max_rounds`, if positive) run out first.
inline AuditResult run_audit(const std::vector<InterpretedBallot>& ballots,
                             const std::vector<Assorter>& assorters, const EntityIndex& idx,
                             const RiskParams& params, std::uint64_t seed,
                             long long round_size, long long max_rounds = 0) {
    if (ballots.empty()) throw PreconditionError("run_audit: no ballots");
    if (assorters.empty()) throw PreconditionError("run_audit: no assertions to test");
    if (round_size < 1) throw PreconditionError("run_audit: round size must be >= 1");

    const long long n = static_cast<long long>(ballots.size());
    std::vector<std::size_t> order(ballots.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    fisher_yates(order, rng);

    AuditResult result;
    result.seed = seed;
    std::vector<KKMartingale> trackers;
    for (const auto& assorter : assorters) {
        trackers.emplace_back(n, params.t_null, params.g_shift);
        result.assertions.push_back(AssertionAuditState{assorter.assertion.label, {}, 1.0,
                                                        false, -1});
    }

    long long drawn = 0;
    int round = 0;
    while (true) {
        bool all_certified = true;
        for (const auto& st : result.assertions) all_certified = all_certified && st.certified;
        if (all_certified) {
            result.outcome = AuditOutcome::certified;
            break;
        }
        if (drawn >= n || (max_rounds > 0 && round >= max_rounds)) {
            result.outcome = AuditOutcome::full_count;
            break;
        }

        ++round;
        AuditRoundRecord record;
        record.round = round;
        long long take = std::min(round_size, n - drawn);
        for (long long i = 0; i < take; ++i) {
            const InterpretedBallot& b = ballots[order[static_cast<std::size_t>(drawn + i)]];
            record.drawn_ids.push_back(b.ballot_id);
            for (std::size_t k = 0; k < assorters.size(); ++k) {
                if (result.assertions[k].certified) continue;
                double v = assorters[k].value(b, idx).to_double();
                result.assertions[k].samples.push_back(v);
                trackers[k].update(v);
            }
        }
        drawn += take;
        for (std::size_t k = 0; k < assorters.size(); ++k) {
            auto& st = result.assertions[k];
            if (!st.certified) {
                st.p_value = trackers[k].p_value();
                if (st.p_value <= params.risk_limit) {
                    st.certified = true;
                    st.certified_after = drawn;
                }
            }
            record.p_values.push_back(st.p_value);
        }
        result.rounds.push_back(std::move(record));
    }
    result.ballots_examined = drawn;
    return result;
}

enum class AsnMethod { simulate, deterministic };

inline const char* to_string(AsnMethod m) {
    return m == AsnMethod::simulate ? "sim" : "det";
}

constexpr std::array<double, 5> kAsnQuantileProbes{0.10, 0.25, 0.50, 0.75, 0.90};

/// Estimated number of ballot draws before certification. `value` is the
/// mean stopping time; infinity means at least one replication (or the
/// deterministic walk) never certified inside the population.
struct AsnEstimate {
    AsnMethod method = AsnMethod::deterministic;
    double value = std::numeric_limits<double>::infinity();
    long long reps = 0;
    long long never_stopped = 0;
    std::array<double, 5> quantiles{};  // stop-time quantiles (simulate only)
};

/// Deterministic ASN: walks a constant sequence equal to the population
/// mean through the martingale and reports the first certifying sample
/// size, or infinity if the whole population does not certify.
inline AsnEstimate estimate_asn_deterministic(const std::vector<double>& population,
                                              const RiskParams& params) {
    if (population.empty()) throw PreconditionError("empty population");
    double sum = 0;
    for (double x : population) {
        if (x < 0) throw DomainError("negative assorter value");
        sum += x;
    }
    double mean = sum / static_cast<double>(population.size());

    AsnEstimate est;
    est.method = AsnMethod::deterministic;
    est.quantiles.fill(std::numeric_limits<double>::infinity());
    KKMartingale kk(static_cast<long long>(population.size()), params.t_null, params.g_shift);
    for (std::size_t j = 1; j <= population.size(); ++j) {
        kk.update(mean);
        if (kk.p_value() <= params.risk_limit) {
            est.value = static_cast<double>(j);
            break;
        }
    }
    return est;
}

namespace detail {

inline double simulate_one_rep(std::vector<double>& scratch, const RiskParams& params,
                               std::uint64_t rep_seed) {
    std::mt19937_64 rng(rep_seed);
    fisher_yates(scratch, rng);
    KKMartingale kk(static_cast<long long>(scratch.size()), params.t_null, params.g_shift);
    for (std::size_t j = 0; j < scratch.size(); ++j) {
        kk.update(scratch[j]);
        if (kk.p_value() <= params.risk_limit) return static_cast<double>(j + 1);
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Simulated ASN: repeatedly permutes the true assorter population with
/// per-replication seeds derived from (seed, rep) and records when each
/// permutation first certifies. The mean is infinite as soon as any
/// replication fails to certify; the stop-time quantiles are always
/// reported. Results do not depend on `threads`.
inline AsnEstimate estimate_asn_simulate(const std::vector<double>& population,
                                         const RiskParams& params, long long reps,
                                         std::uint64_t seed, int threads = 1) {
    if (population.empty()) throw PreconditionError("empty population");
    if (reps < 1) throw PreconditionError("need at least one replication");
    for (double x : population)
        if (x < 0) throw DomainError("negative assorter value");

    std::vector<double> stops(static_cast<std::size_t>(reps));
    int workers = std::max(1, threads);
    if (workers == 1) {
        std::vector<double> scratch;
        for (long long r = 0; r < reps; ++r) {
            scratch = population;
            stops[static_cast<std::size_t>(r)] =
                detail::simulate_one_rep(scratch, params, derive_seed(seed, static_cast<std::uint64_t>(r)));
        }
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                std::vector<double> scratch;
                for (long long r = w; r < reps; r += workers) {
                    scratch = population;
                    stops[static_cast<std::size_t>(r)] = detail::simulate_one_rep(
                        scratch, params, derive_seed(seed, static_cast<std::uint64_t>(r)));
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    AsnEstimate est;
    est.method = AsnMethod::simulate;
    est.reps = reps;
    double sum = 0;
    for (double s : stops) {
        if (std::isinf(s)) ++est.never_stopped;
        sum += s;
    }
    est.value = est.never_stopped > 0 ? std::numeric_limits<double>::infinity()
                                      : sum / static_cast<double>(reps);
    std::sort(stops.begin(), stops.end());
    for (std::size_t q = 0; q < kAsnQuantileProbes.size(); ++q) {
        // Nearest-rank quantile: smallest stop time with rank >= p * reps.
        auto rank = static_cast<std::size_t>(
            std::ceil(kAsnQuantileProbes[q] * static_cast<double>(reps)));
        if (rank > 0) --rank;
        est.quantiles[q] = stops[std::min(rank, stops.size() - 1)];
    }
    return est;
}

}  // namespace plaudit
