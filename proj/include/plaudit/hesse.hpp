#pragma once

#include "plaudit/model.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace plaudit {

/// Raw markings on a Hesse free-list ballot, before interpretation:
/// per-candidate direct votes (0..max_votes_per_candidate each),
/// crossed-out candidates, and at most one party selection.
struct RawHesseBallot {
    std::string ballot_id;
    std::map<std::string, int> direct_votes;
    std::set<std::string> crossed_out;
    std::optional<std::string> party_selection;

    bool operator==(const RawHesseBallot&) const = default;
};

/// Why interpretation spoiled a ballot. Checked in this order; the first
/// failing rule is the one reported.
enum class SpoilReason {
    over_vote_per_candidate,
    over_vote_total,
    vote_for_crossed_out,
    unknown_party,
};

inline const char* to_string(SpoilReason r) {
    switch (r) {
        case SpoilReason::over_vote_per_candidate: return "over_vote_per_candidate";
        case SpoilReason::over_vote_total: return "over_vote_total";
        case SpoilReason::vote_for_crossed_out: return "vote_for_crossed_out";
        case SpoilReason::unknown_party: return "unknown_party";
    }
    return "?";
}

struct InterpretationReport {
    long long total = 0;
    long long valid = 0;
    long long invalid = 0;
    std::map<SpoilReason, long long> reasons;

    bool operator==(const InterpretationReport&) const = default;
};

struct InterpretationResult {
    std::vector<InterpretedBallot> ballots;
    InterpretationReport report;
};

namespace detail {

inline void check_hesse_spec(const ContestSpec& spec) {
    if (spec.scf_kind != ScfKind::hamilton_free_list)
        throw PreconditionError("free-list interpretation requires a hamilton_free_list contest");
    if (spec.max_votes_per_candidate != 3)
        throw PreconditionError("free-list ballots allow exactly 3 votes per candidate");
    if (spec.max_votes_per_ballot != spec.seats)
        throw PreconditionError("free-list ballots carry exactly as many votes as seats");
}

inline InterpretedBallot interpret_indexed(const RawHesseBallot& raw, const ContestSpec& spec,
                                           const EntityIndex& idx,
                                           std::optional<SpoilReason>& reason) {
    reason.reset();

    // Structural corruption aborts; it cannot be a voter marking.
    for (const auto& [cand, n] : raw.direct_votes) {
        if (!idx.is_candidate(cand))
            throw InputFormatError("ballot '" + raw.ballot_id + "': unknown candidate '" +
                                   cand + "'");
        if (n < 0)
            throw InputFormatError("ballot '" + raw.ballot_id + "': negative count for '" +
                                   cand + "'");
    }
    for (const auto& cand : raw.crossed_out) {
        if (!idx.is_candidate(cand))
            throw InputFormatError("ballot '" + raw.ballot_id + "': crossed out unknown '" +
                                   cand + "'");
    }

    long long direct_total = 0;
    for (const auto& [cand, n] : raw.direct_votes) {
        if (n > spec.max_votes_per_candidate) reason = SpoilReason::over_vote_per_candidate;
        direct_total += n;
    }
    if (!reason && direct_total > spec.max_votes_per_ballot)
        reason = SpoilReason::over_vote_total;
    if (!reason) {
        for (const auto& [cand, n] : raw.direct_votes) {
            if (n > 0 && raw.crossed_out.count(cand) != 0) {
                reason = SpoilReason::vote_for_crossed_out;
                break;
            }
        }
    }
    if (!reason && raw.party_selection && !idx.is_party(*raw.party_selection))
        reason = SpoilReason::unknown_party;

    if (reason) return InterpretedBallot{raw.ballot_id, {}, false};

    InterpretedBallot out;
    out.ballot_id = raw.ballot_id;
    out.valid = true;
    for (const auto& [cand, n] : raw.direct_votes)
        if (n > 0) out.votes[cand] = n;

    // Party selection distributes the unspent votes one at a time over the
    // party's uncrossed candidates in list order, cycling from the top.
    // Crossing out the whole list makes the remainder lapse; the ballot
    // stays valid with its direct votes only.
    if (raw.party_selection) {
        std::vector<std::string> receivers;
        for (const auto& cand : idx.candidates_of(*raw.party_selection))
            if (raw.crossed_out.count(cand) == 0) receivers.push_back(cand);
        long long remaining = spec.max_votes_per_ballot - direct_total;
        if (!receivers.empty()) {
            for (long long i = 0; i < remaining; ++i)
                ++out.votes[receivers[static_cast<std::size_t>(i) % receivers.size()]];
        }
    }
    return out;
}

}  // namespace detail

/// Interprets one raw ballot. Spoiled ballots come back valid=false with
/// no votes; `reason` reports why.
inline InterpretedBallot interpret(const RawHesseBallot& raw, const ContestSpec& spec,
                                   std::optional<SpoilReason>& reason) {
    detail::check_hesse_spec(spec);
    EntityIndex idx(spec);
    return detail::interpret_indexed(raw, spec, idx, reason);
}

inline InterpretedBallot interpret(const RawHesseBallot& raw, const ContestSpec& spec) {
    std::optional<SpoilReason> reason;
    return interpret(raw, spec, reason);
}

/// Interprets a batch, preserving order, and tallies spoil reasons.
inline InterpretationResult interpret_all(const std::vector<RawHesseBallot>& raws,
                                          const ContestSpec& spec) {
    detail::check_hesse_spec(spec);
    EntityIndex idx(spec);
    InterpretationResult result;
    result.ballots.reserve(raws.size());
    for (const auto& raw : raws) {
        std::optional<SpoilReason> reason;
        result.ballots.push_back(detail::interpret_indexed(raw, spec, idx, reason));
        ++result.report.total;
        if (reason) {
            ++result.report.invalid;
            ++result.report.reasons[*reason];
        } else {
            ++result.report.valid;
        }
    }
    return result;
}

}  // namespace plaudit
