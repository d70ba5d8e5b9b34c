#pragma once

#include "plaudit/assertions.hpp"
#include "plaudit/assorters.hpp"
#include "plaudit/io.hpp"
#include "plaudit/risk.hpp"
#include "plaudit/social_choice.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace plaudit {

/// Which assertion family to generate for a contest.
enum class AssertionMode { all_seats, abr, dhondt, within_party, pairwise, supermajority, all };

inline const char* to_string(AssertionMode m) {
    switch (m) {
        case AssertionMode::all_seats: return "all-seats";
        case AssertionMode::abr: return "abr";
        case AssertionMode::dhondt: return "dhondt";
        case AssertionMode::within_party: return "within-party";
        case AssertionMode::pairwise: return "pairwise";
        case AssertionMode::supermajority: return "supermajority";
        case AssertionMode::all: return "all";
    }
    return "?";
}

inline AssertionMode assertion_mode_from_string(const std::string& s) {
    if (s == "all-seats") return AssertionMode::all_seats;
    if (s == "abr") return AssertionMode::abr;
    if (s == "dhondt") return AssertionMode::dhondt;
    if (s == "within-party") return AssertionMode::within_party;
    if (s == "pairwise") return AssertionMode::pairwise;
    if (s == "supermajority") return AssertionMode::supermajority;
    if (s == "all") return AssertionMode::all;
    throw ParseError("unknown assertion mode '" + s + "'");
}

/// The outcome under audit: the profile's reported outcome when present,
/// otherwise one computed from the tallies (which may throw TieError).
inline ReportedOutcome effective_reported(const ElectionProfile& profile) {
    if (profile.reported) return *profile.reported;
    ReportedOutcome out;
    switch (profile.contest.scf_kind) {
        case ScfKind::hamilton_free_list: {
            auto alloc = hamilton_allocate(profile.tallies, profile.contest.seats);
            out.party_seats = alloc.final_seats;
            out.floor_seats = alloc.floor_seats;
            break;
        }
        case ScfKind::highest_averages: {
            auto alloc = highest_averages_allocate(profile.tallies, profile.contest.seats,
                                                   profile.contest.divisors);
            out.party_seats = alloc.seats;
            break;
        }
        case ScfKind::plurality:
        case ScfKind::supermajority: {
            out.party_seats[plurality_winner(profile.tallies)] = profile.contest.seats;
            break;
        }
    }
    return out;
}

/// Reported per-party winners, from the profile when announced, computed
/// from candidate tallies otherwise (which may throw TieError).
inline std::map<std::string, std::set<std::string>> effective_candidate_winners(
    const ElectionProfile& profile, const ReportedOutcome& reported) {
    std::map<std::string, std::set<std::string>> winners;
    if (reported.candidate_winners) winners = *reported.candidate_winners;
    for (const auto& party : profile.contest.parties) {
        auto it = reported.party_seats.find(party.party_id);
        int seats = it == reported.party_seats.end() ? 0 : it->second;
        if (winners.count(party.party_id) != 0) continue;
        std::map<std::string, long long> cand_tallies;
        for (const auto& c : party.candidates)
            cand_tallies[c] = profile.tallies.per_candidate.at(c);
        winners[party.party_id] = within_party_winners(cand_tallies, seats);
    }
    return winners;
}

namespace detail {

inline void append(AssertionSet& into, AssertionSet from, const std::string& note_label) {
    for (auto& a : from.assertions) into.assertions.push_back(std::move(a));
    if (!from.sufficiency_note.empty()) {
        if (!into.sufficiency_note.empty()) into.sufficiency_note += "\n";
        into.sufficiency_note += "[" + note_label + "] " + from.sufficiency_note;
    }
}

inline AssertionSet within_party_all(const ElectionProfile& profile,
                                     const ReportedOutcome& reported) {
    auto winners = effective_candidate_winners(profile, reported);
    AssertionSet set;
    set.sufficiency_note =
        "Each reported winner of a list is asserted to out-poll each reported non-winner "
        "of the same list, certifying every party's seat-takers.";
    for (const auto& party : profile.contest.parties) {
        auto sub = within_party_assertions(party, winners.at(party.party_id));
        for (auto& a : sub.assertions) set.assertions.push_back(std::move(a));
    }
    return set;
}

inline const std::string& single_winner(const ReportedOutcome& reported) {
    if (reported.party_seats.size() != 1)
        throw ValidationError("single-winner contest reports more than one seat holder");
    return reported.party_seats.begin()->first;
}

}  // namespace detail

/// Generates the assertion set certifying the profile's reported outcome
/// in the requested mode. Modes apply to specific social choice
/// functions; `all` means every family applicable to the contest.
inline AssertionSet generate_assertions(const ElectionProfile& profile, AssertionMode mode,
                                        bool prune_trivial = false) {
    const ContestSpec& spec = profile.contest;
    ReportedOutcome reported = effective_reported(profile);
    auto unsupported = [&]() {
        throw ValidationError(std::string("mode '") + to_string(mode) +
                              "' does not apply to a " + to_string(spec.scf_kind) + " contest");
    };

    AssertionSet set;
    switch (spec.scf_kind) {
        case ScfKind::plurality: {
            if (mode != AssertionMode::pairwise && mode != AssertionMode::all) unsupported();
            const std::string& w = detail::single_winner(reported);
            set.sufficiency_note =
                "The reported winner is asserted to out-poll every other candidate, which "
                "is the plurality outcome.";
            for (const auto& [cand, votes] : profile.tallies.per_candidate)
                if (cand != w) set.assertions.push_back(pairwise_assertion(w, cand));
            break;
        }
        case ScfKind::supermajority: {
            if (mode != AssertionMode::supermajority && mode != AssertionMode::all)
                unsupported();
            const std::string& w = detail::single_winner(reported);
            set.sufficiency_note =
                "The reported winner is asserted to exceed the required share of all "
                "votes, which is the supermajority outcome.";
            set.assertions.push_back(supermajority_assertion(w, *spec.threshold));
            break;
        }
        case ScfKind::hamilton_free_list: {
            bool matched = false;
            if (mode == AssertionMode::all_seats || mode == AssertionMode::all) {
                detail::append(set,
                               hamilton_all_seats_assertions(reported, spec.seats, prune_trivial),
                               "all-seats");
                matched = true;
            }
            if (mode == AssertionMode::abr || mode == AssertionMode::all) {
                detail::append(set, hamilton_abr_assertions(profile.tallies, spec.seats), "abr");
                matched = true;
            }
            if (mode == AssertionMode::within_party || mode == AssertionMode::all) {
                detail::append(set, detail::within_party_all(profile, reported), "within-party");
                matched = true;
            }
            if (!matched) unsupported();
            break;
        }
        case ScfKind::highest_averages: {
            if (mode == AssertionMode::dhondt || mode == AssertionMode::all) {
                auto alloc = highest_averages_from_reported(reported.party_seats, spec.seats);
                detail::append(set, dhondt_assertions(alloc, spec.divisors), "divisor-pairs");
            } else {
                unsupported();
            }
            break;
        }
    }
    set.validate();
    return set;
}

/// Compiles every assertion of a set against the contest's default vote
/// bounds.
inline std::vector<Assorter> compile_assorters(const ElectionProfile& profile,
                                               const AssertionSet& set) {
    VoteBounds bounds = VoteBounds::from_spec(profile.contest);
    std::vector<Assorter> out;
    out.reserve(set.assertions.size());
    for (const auto& a : set.assertions) out.push_back(assorterize(a, bounds));
    return out;
}

/// Margin summary of one compiled assertion, with the aggregate
/// closed-form mean where one exists for the assertion kind.
struct MarginRow {
    std::string label;
    AssertionKind kind = AssertionKind::pairwise;
    Rat mean;
    Rat margin;
    Rat upper_bound;
    std::optional<Rat> aggregate;
    bool aggregate_matches = true;
};

inline std::vector<MarginRow> compute_margins(const ElectionProfile& profile,
                                              const AssertionSet& set) {
    EntityIndex idx(profile.contest);
    VoteBounds bounds = VoteBounds::from_spec(profile.contest);
    std::vector<MarginRow> rows;
    for (const auto& assertion : set.assertions) {
        Assorter assorter = assorterize(assertion, bounds);
        MeanMargin mm = assorter_mean_margin(assorter, profile.ballots, idx);
        MarginRow row;
        row.label = assertion.label;
        row.kind = assertion.kind;
        row.mean = mm.mean;
        row.margin = mm.margin;
        row.upper_bound = assorter.upper_bound;
        row.aggregate = aggregate_mean(assertion, profile.tallies, profile.contest.seats);
        row.aggregate_matches = !row.aggregate || *row.aggregate == row.mean;
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Expected sample sizes for one assertion at several risk limits.
struct AsnRow {
    std::string label;
    Rat mean;
    Rat margin;
    std::vector<AsnEstimate> estimates;  // parallel to the risk-limit list
};

inline std::vector<AsnRow> estimate_asns(const ElectionProfile& profile,
                                         const AssertionSet& set,
                                         const std::vector<double>& risk_limits,
                                         AsnMethod method, long long reps, std::uint64_t seed,
                                         int threads = 1, double g_shift = 0.1) {
    EntityIndex idx(profile.contest);
    std::vector<Assorter> assorters = compile_assorters(profile, set);
    std::vector<AsnRow> rows;
    for (std::size_t k = 0; k < assorters.size(); ++k) {
        std::vector<double> population;
        population.reserve(profile.ballots.size());
        for (const auto& b : profile.ballots)
            population.push_back(assorters[k].value(b, idx).to_double());

        AsnRow row;
        row.label = set.assertions[k].label;
        MeanMargin mm = assorter_mean_margin(assorters[k], profile.ballots, idx);
        row.mean = mm.mean;
        row.margin = mm.margin;
        for (double alpha : risk_limits) {
            RiskParams params;
            params.risk_limit = alpha;
            params.g_shift = g_shift;
            params.population_size = static_cast<long long>(population.size());
            if (method == AsnMethod::deterministic) {
                row.estimates.push_back(estimate_asn_deterministic(population, params));
            } else {
                row.estimates.push_back(estimate_asn_simulate(
                    population, params, reps, derive_seed(seed, static_cast<std::uint64_t>(k)),
                    threads));
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// The audit modes a contest's report covers, one table row each.
inline std::vector<AssertionMode> report_modes(ScfKind kind) {
    switch (kind) {
        case ScfKind::plurality: return {AssertionMode::pairwise};
        case ScfKind::supermajority: return {AssertionMode::supermajority};
        case ScfKind::hamilton_free_list: return {AssertionMode::abr, AssertionMode::all_seats};
        case ScfKind::highest_averages: return {AssertionMode::dhondt};
    }
    return {};
}

/// Builds one summary row: the contest shape plus, per risk limit, the
/// worst (largest) ASN over the mode's assertions.
inline ReportRow build_report_row(const ElectionProfile& profile, AssertionMode mode,
                                  const std::vector<double>& risk_limits, AsnMethod method,
                                  long long reps, std::uint64_t seed, int threads = 1) {
    AssertionSet set = generate_assertions(profile, mode);
    ReportRow row;
    row.contest = profile.contest.name;
    row.seats = profile.contest.seats;
    row.ballots = profile.tallies.ballot_count();
    row.parties = static_cast<long long>(profile.contest.parties.size());
    row.valid = profile.tallies.valid_ballots;
    row.mode = to_string(mode);
    row.assertion_count = static_cast<long long>(set.assertions.size());
    row.asn.assign(risk_limits.size(), 0.0);
    auto rows = estimate_asns(profile, set, risk_limits, method, reps, seed, threads);
    for (std::size_t r = 0; r < risk_limits.size(); ++r) {
        double worst = 0.0;
        for (const auto& asn_row : rows) worst = std::max(worst, asn_row.estimates[r].value);
        row.asn[r] = rows.empty() ? std::numeric_limits<double>::quiet_NaN() : worst;
    }
    return row;
}

}  // namespace plaudit
