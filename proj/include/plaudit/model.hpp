#pragma once

#include "plaudit/errors.hpp"
#include "plaudit/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace plaudit {

enum class ScfKind { plurality, supermajority, hamilton_free_list, highest_averages };

inline const char* to_string(ScfKind k) {
    switch (k) {
        case ScfKind::plurality: return "plurality";
        case ScfKind::supermajority: return "supermajority";
        case ScfKind::hamilton_free_list: return "hamilton_free_list";
        case ScfKind::highest_averages: return "highest_averages";
    }
    return "?";
}

inline ScfKind scf_kind_from_string(const std::string& s) {
    if (s == "plurality") return ScfKind::plurality;
    if (s == "supermajority") return ScfKind::supermajority;
    if (s == "hamilton_free_list") return ScfKind::hamilton_free_list;
    if (s == "highest_averages") return ScfKind::highest_averages;
    throw ParseError("unknown social choice function '" + s + "'");
}

/// One party's candidate list, in ballot order (top of the list first).
struct PartyList {
    std::string party_id;
    std::vector<std::string> candidates;

    bool operator==(const PartyList&) const = default;
};

/// Static description of a contest. Immutable once validated; everything
/// downstream (interpretation, tallies, assertions, audits) reads it only.
struct ContestSpec {
    std::string name;
    ScfKind scf_kind = ScfKind::plurality;
    int seats = 1;                    // S
    int max_votes_per_candidate = 1;  // per-candidate cap on one ballot
    int max_votes_per_ballot = 1;     // cap on a ballot's total votes
    std::vector<PartyList> parties;
    std::vector<Rat> divisors;        // highest_averages only: d(1..S)
    std::optional<Rat> threshold;     // supermajority only: t in (0,1)

    void validate() const;

    bool operator==(const ContestSpec&) const = default;
};

/// One interpreted ballot: nonnegative per-candidate vote counts.
/// A spoiled ballot is kept (it still counts toward the ballot list the
/// audit samples from) but carries no votes at all.
struct InterpretedBallot {
    std::string ballot_id;
    std::map<std::string, long long> votes;  // zero counts are omitted
    bool valid = true;

    long long total_votes() const {
        long long t = 0;
        for (const auto& [cand, n] : votes) t += n;
        return t;
    }

    bool operator==(const InterpretedBallot&) const = default;
};

/// Vote totals for a contest. Party totals aggregate their candidates.
struct Tallies {
    std::map<std::string, long long> per_candidate;
    std::map<std::string, long long> per_party;  // T_e
    long long total_votes = 0;                   // T_L, valid ballots only
    long long valid_ballots = 0;                 // V
    long long invalid_ballots = 0;               // I

    long long ballot_count() const { return valid_ballots + invalid_ballots; }

    /// Total for a party or candidate identifier. Party ids win when an id
    /// is (incorrectly) both, but validation rules that out.
    long long entity_total(const std::string& id) const {
        if (auto it = per_party.find(id); it != per_party.end()) return it->second;
        if (auto it = per_candidate.find(id); it != per_candidate.end()) return it->second;
        throw UnknownEntityError("unknown entity '" + id + "'");
    }

    /// Vote share p_e = T_e / T_L.
    Rat proportion(const std::string& id) const {
        if (total_votes == 0) throw DomainError("proportion undefined: no votes");
        return Rat(entity_total(id)) / Rat(total_votes);
    }

    bool operator==(const Tallies&) const = default;
};

/// The outcome the election authority announced. Audits test this claim;
/// they never recompute it from the tallies being audited.
struct ReportedOutcome {
    std::map<std::string, int> party_seats;  // entity -> seats won (a_e)
    std::optional<std::map<std::string, int>> floor_seats;
    std::optional<std::map<std::string, std::set<std::string>>> candidate_winners;

    void validate(const ContestSpec& spec) const;

    bool operator==(const ReportedOutcome&) const = default;
};

/// Fast lookups over a validated ContestSpec.
class EntityIndex {
public:
    explicit EntityIndex(const ContestSpec& spec) {
        for (const auto& p : spec.parties) {
            party_ids_.push_back(p.party_id);
            members_[p.party_id] = p.candidates;
            for (const auto& c : p.candidates) candidate_party_[c] = p.party_id;
        }
    }

    bool is_party(const std::string& id) const { return members_.count(id) != 0; }
    bool is_candidate(const std::string& id) const { return candidate_party_.count(id) != 0; }

    const std::vector<std::string>& parties() const { return party_ids_; }

    const std::vector<std::string>& candidates_of(const std::string& party) const {
        auto it = members_.find(party);
        if (it == members_.end()) throw UnknownEntityError("unknown party '" + party + "'");
        return it->second;
    }

    const std::string& party_of(const std::string& candidate) const {
        auto it = candidate_party_.find(candidate);
        if (it == candidate_party_.end())
            throw UnknownEntityError("unknown candidate '" + candidate + "'");
        return it->second;
    }

    /// Votes ballot b contributes to an entity: the candidate's own count,
    /// or the sum over a party's candidates. b_e in assertion notation.
    long long ballot_votes(const InterpretedBallot& b, const std::string& id) const {
        if (auto it = members_.find(id); it != members_.end()) {
            long long sum = 0;
            for (const auto& c : it->second) {
                if (auto v = b.votes.find(c); v != b.votes.end()) sum += v->second;
            }
            return sum;
        }
        if (candidate_party_.count(id) != 0) {
            auto v = b.votes.find(id);
            return v == b.votes.end() ? 0 : v->second;
        }
        throw UnknownEntityError("unknown entity '" + id + "'");
    }

private:
    std::vector<std::string> party_ids_;
    std::map<std::string, std::vector<std::string>> members_;
    std::map<std::string, std::string> candidate_party_;
};

inline void ContestSpec::validate() const {
    if (name.empty()) throw ValidationError("contest name is empty");
    if (seats < 1) throw ValidationError("seats must be >= 1");
    if (max_votes_per_candidate < 1)
        throw ValidationError("max_votes_per_candidate must be >= 1");
    if (max_votes_per_ballot < max_votes_per_candidate)
        throw ValidationError("max_votes_per_ballot must be >= max_votes_per_candidate");
    if (parties.empty()) throw ValidationError("contest has no parties");

    std::set<std::string> seen;
    for (const auto& p : parties) {
        if (p.party_id.empty()) throw ValidationError("empty party id");
        if (!seen.insert(p.party_id).second)
            throw ValidationError("duplicate id '" + p.party_id + "'");
        if (p.candidates.empty())
            throw ValidationError("party '" + p.party_id + "' has no candidates");
        if (scf_kind == ScfKind::hamilton_free_list &&
            static_cast<int>(p.candidates.size()) > seats)
            throw ValidationError("party '" + p.party_id + "' lists more candidates than seats");
        for (const auto& c : p.candidates) {
            if (c.empty()) throw ValidationError("empty candidate id");
            if (!seen.insert(c).second) throw ValidationError("duplicate id '" + c + "'");
        }
    }

    if (scf_kind == ScfKind::highest_averages) {
        if (static_cast<int>(divisors.size()) != seats)
            throw ValidationError("highest_averages needs exactly one divisor per seat");
        for (std::size_t i = 0; i < divisors.size(); ++i) {
            if (divisors[i].sign() <= 0) throw ValidationError("divisors must be positive");
            if (i > 0 && divisors[i] < divisors[i - 1])
                throw ValidationError("divisors must be nondecreasing");
        }
    } else if (!divisors.empty()) {
        throw ValidationError("divisors are only meaningful for highest_averages");
    }

    if (scf_kind == ScfKind::supermajority) {
        if (!threshold) throw ValidationError("supermajority needs a threshold");
        if (*threshold <= Rat(0) || *threshold >= Rat(1))
            throw ValidationError("threshold must be strictly between 0 and 1");
    } else if (threshold) {
        throw ValidationError("threshold is only meaningful for supermajority");
    }
}

inline void ReportedOutcome::validate(const ContestSpec& spec) const {
    EntityIndex idx(spec);
    int total = 0;
    for (const auto& [id, n] : party_seats) {
        if (!idx.is_party(id) && !idx.is_candidate(id))
            throw UnknownEntityError("reported seats for unknown entity '" + id + "'");
        if (n < 0) throw ValidationError("negative seat count for '" + id + "'");
        total += n;
    }
    if (total != spec.seats)
        throw ValidationError("reported seats sum to " + std::to_string(total) +
                              ", expected " + std::to_string(spec.seats));
    if (floor_seats) {
        for (const auto& [id, n] : *floor_seats) {
            if (!idx.is_party(id))
                throw UnknownEntityError("floor seats for unknown party '" + id + "'");
            auto it = party_seats.find(id);
            int final_n = it == party_seats.end() ? 0 : it->second;
            if (n < 0 || final_n - n < 0 || final_n - n > 1)
                throw ValidationError("floor seats for '" + id +
                                      "' are not within one seat of the final count");
        }
    }
    if (candidate_winners) {
        for (const auto& [party, winners] : *candidate_winners) {
            if (!idx.is_party(party))
                throw UnknownEntityError("winners for unknown party '" + party + "'");
            const auto& members = idx.candidates_of(party);
            for (const auto& w : winners) {
                bool found = false;
                for (const auto& c : members) found = found || c == w;
                if (!found)
                    throw ValidationError("winner '" + w + "' is not on the list of '" +
                                          party + "'");
            }
            if (auto it = party_seats.find(party); it != party_seats.end()) {
                if (static_cast<int>(winners.size()) != it->second)
                    throw ValidationError("party '" + party + "' reports " +
                                          std::to_string(winners.size()) + " winners but " +
                                          std::to_string(it->second) + " seats");
            }
        }
    }
}

/// Tabulates interpreted ballots. Every party and candidate appears in the
/// result, with zero totals where nobody voted for them.
inline Tallies tallies_from_ballots(const std::vector<InterpretedBallot>& ballots,
                                    const ContestSpec& spec) {
    EntityIndex idx(spec);
    Tallies t;
    for (const auto& p : spec.parties) {
        t.per_party[p.party_id] = 0;
        for (const auto& c : p.candidates) t.per_candidate[c] = 0;
    }
    for (const auto& b : ballots) {
        if (!b.valid) {
            if (!b.votes.empty())
                throw BallotOutOfBounds("ballot '" + b.ballot_id + "': spoiled but carries votes");
            ++t.invalid_ballots;
            continue;
        }
        // Only the ballot-total cap is checked here. Per-candidate caps
        // constrain raw markings, not interpreted counts: the free-list
        // distribution rule may legitimately push one candidate above them.
        long long bt = 0;
        for (const auto& [cand, n] : b.votes) {
            if (n < 0)
                throw BallotOutOfBounds("ballot '" + b.ballot_id + "': negative count");
            bt += n;
        }
        if (bt > spec.max_votes_per_ballot)
            throw BallotOutOfBounds("ballot '" + b.ballot_id + "': " + std::to_string(bt) +
                                    " votes exceed the ballot cap");
        ++t.valid_ballots;
        for (const auto& [cand, n] : b.votes) {
            if (n == 0) continue;
            const std::string& party = idx.party_of(cand);  // throws on unknown ids
            t.per_candidate[cand] += n;
            t.per_party[party] += n;
            t.total_votes += n;
        }
    }
    return t;
}

}  // namespace plaudit
