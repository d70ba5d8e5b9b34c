#pragma once

#include "plaudit/assertions.hpp"
#include "plaudit/model.hpp"
#include "plaudit/social_choice.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace plaudit {

/// Per-ballot caps used to bound assorter values: `total` caps b_T and
/// `entity(id)` caps b_e. A ballot may concentrate every vote on one
/// entity, so the safe default per-entity cap equals the ballot total cap.
struct VoteBounds {
    Rat total;
    Rat default_entity;
    std::map<std::string, Rat> entity_overrides;

    static VoteBounds from_spec(const ContestSpec& spec) {
        VoteBounds b;
        b.total = Rat(spec.max_votes_per_ballot);
        b.default_entity = Rat(spec.max_votes_per_ballot);
        return b;
    }

    static VoteBounds uniform(const Rat& cap) { return VoteBounds{cap, cap, {}}; }

    const Rat& entity(const std::string& id) const {
        auto it = entity_overrides.find(id);
        return it == entity_overrides.end() ? default_entity : it->second;
    }

    bool operator==(const VoteBounds&) const = default;
};

/// Raw per-ballot score of an assertion: g(b) = sum coeff_e * b_e +
/// total_coeff * b_T for valid ballots, 0 for spoiled ones. Averaged over
/// the ballot list, g recovers the assertion value scaled by 1/|L|, which
/// is why the sign of its mean decides the assertion.
inline Rat proto_value(const LinearAssertion& a, const InterpretedBallot& b,
                       const EntityIndex& idx) {
    if (!b.valid) return Rat(0);
    Rat g;
    for (const auto& [entity, coeff] : a.entity_coeffs)
        g += coeff * Rat(idx.ballot_votes(b, entity));
    if (!a.total_coeff.is_zero()) g += a.total_coeff * Rat(b.total_votes());
    return g;
}

/// A lower bound on proto_value over all possible ballots, never above 0
/// (a spoiled ballot scores 0).
inline Rat proto_lower_bound(const LinearAssertion& a, const VoteBounds& bounds) {
    // Share-difference pairs tie their two negative terms to the same
    // ballot: b_T >= b_B, so for -1 < d < 0 the joint minimum of
    // -b_B - d*b_T is -(1+d) * min(cap_B, cap_T), which beats summing the
    // independent minima.
    if (a.kind == AssertionKind::pairwise_diff) {
        Rat d = -a.total_coeff;
        if (Rat(-1) < d && d < Rat(0)) {
            const std::string* neg_entity = nullptr;
            bool shape_ok = a.entity_coeffs.size() == 2;
            for (const auto& [entity, coeff] : a.entity_coeffs) {
                if (coeff == Rat(-1))
                    neg_entity = &entity;
                else if (coeff != Rat(1))
                    shape_ok = false;
            }
            if (shape_ok && neg_entity) {
                Rat cap = Rat::min(bounds.entity(*neg_entity), bounds.total);
                return -(Rat(1) + d) * cap;
            }
        }
    }
    Rat low;
    for (const auto& [entity, coeff] : a.entity_coeffs)
        if (coeff.sign() < 0) low += coeff * bounds.entity(entity);
    if (a.total_coeff.sign() < 0) low += a.total_coeff * bounds.total;
    return Rat::min(low, Rat(0));
}

/// An upper bound on proto_value over all possible ballots, never below 0.
inline Rat proto_upper_bound(const LinearAssertion& a, const VoteBounds& bounds) {
    Rat high;
    for (const auto& [entity, coeff] : a.entity_coeffs)
        if (coeff.sign() > 0) high += coeff * bounds.entity(entity);
    if (a.total_coeff.sign() > 0) high += a.total_coeff * bounds.total;
    return Rat::max(high, Rat(0));
}

/// An assertion rescaled into assorter form: h(b) = scale * g(b) + 1/2
/// maps ballots into [0, upper_bound] and its mean exceeds 1/2 exactly
/// when the assertion holds. That puts every assertion in the shape a
/// ballot-polling risk calculation consumes.
struct Assorter {
    LinearAssertion assertion;
    Rat lower_bound;  // a <= min over ballots of proto_value
    Rat scale;        // c
    Rat upper_bound;  // M >= max over ballots of value()
    VoteBounds vote_bounds;

    Rat value(const InterpretedBallot& b, const EntityIndex& idx) const {
        return scale * proto_value(assertion, b, idx) + Rat(1, 2);
    }

    bool operator==(const Assorter&) const = default;
};

/// Compiles an assertion into an assorter. The scale keeps h nonnegative:
/// c = 1 when the lower bound already clears -1/2, else c = -1/(2a).
/// Divisor-table pairs always use c = -1/(2a) so that ballot scores come
/// out in the d(L_B)/(2m)-normalized form their margins are quoted in.
inline Assorter assorterize(const LinearAssertion& assertion, const VoteBounds& bounds) {
    Rat a = proto_lower_bound(assertion, bounds);
    Rat c(1);
    if (assertion.kind == AssertionKind::dhondt_pair) {
        if (a.sign() >= 0)
            throw PreconditionError("divisor pair without a negative side");
        c = -(Rat(1) / (a * Rat(2)));
    } else if (a < Rat(-1, 2)) {
        c = -(Rat(1) / (a * Rat(2)));
    }
    Rat m = c * proto_upper_bound(assertion, bounds) + Rat(1, 2);
    return Assorter{assertion, a, c, m, bounds};
}

/// Assorter for one highest-averages pair (A wins its W_A-th seat over
/// B's L_B-th) where each ballot holds at most `max_entity_votes` votes
/// per party. Scores land on the grid spanned by
/// (b_A * d(L_B)/d(W_A) - b_B + m) / (2m).
inline Assorter dhondt_assorter(const std::string& a, const std::string& b,
                                const HighestAveragesAllocation& alloc,
                                const std::vector<Rat>& divisors, long long max_entity_votes) {
    if (max_entity_votes < 1) throw PreconditionError("per-entity vote cap must be >= 1");
    auto wa = alloc.winner_index.find(a);
    auto lb = alloc.loser_index.find(b);
    if (wa == alloc.winner_index.end() || !wa->second)
        throw PreconditionError("'" + a + "' has no winning table entry");
    if (lb == alloc.loser_index.end() || !lb->second)
        throw PreconditionError("'" + b + "' has no losing table entry");

    HighestAveragesAllocation pair_alloc;
    pair_alloc.winner_index[a] = wa->second;
    pair_alloc.loser_index[b] = lb->second;
    AssertionSet single = dhondt_assertions(pair_alloc, divisors);
    return assorterize(single.assertions.at(0), VoteBounds::uniform(Rat(max_entity_votes)));
}

struct MeanMargin {
    Rat mean;
    Rat margin;  // 2 * mean - 1

    bool operator==(const MeanMargin&) const = default;
};

/// Mean assorter value over the full ballot list (spoiled ballots score
/// 1/2) and the margin 2*mean - 1.
inline MeanMargin assorter_mean_margin(const Assorter& assorter,
                                       const std::vector<InterpretedBallot>& ballots,
                                       const EntityIndex& idx) {
    if (ballots.empty()) throw PreconditionError("mean over an empty ballot list");
    Rat sum;
    for (const auto& b : ballots) sum += assorter.value(b, idx);
    Rat mean = sum / Rat(static_cast<long long>(ballots.size()));
    return MeanMargin{mean, Rat(2) * mean - Rat(1)};
}

/// Closed-form mean of the at-least-delta (share threshold) assorter,
/// computed from aggregate tallies alone:
///   [T_e/(2t) - T_L/2 + (V+I)/2] / (V+I).
/// Matches the per-ballot mean exactly when every valid ballot carries
/// one vote; multi-vote ballots make it an approximation.
inline Rat aggregate_mean_supermajority(const Tallies& tallies, const std::string& entity,
                                        const Rat& t) {
    if (t.sign() <= 0) throw DomainError("threshold must be positive");
    long long n = tallies.ballot_count();
    if (n <= 0) throw DomainError("no ballots");
    Rat te(tallies.entity_total(entity));
    Rat tl(tallies.total_votes);
    Rat count(n);
    return (te / (Rat(2) * t) - tl / Rat(2) + count / Rat(2)) / count;
}

/// Closed-form mean of the share-difference assorter for p_A > p_B + d
/// over ballots carrying up to S votes:
///   [(T_A - T_B - T_L*d + V*S*(1+d)) / (2S(1+d)) + I/2] / (V+I).
/// Exact when the ballot vote cap equals S.
inline Rat aggregate_mean_pairwise_diff(const Tallies& tallies, const std::string& a,
                                        const std::string& b, const Rat& d, int seats) {
    if (d <= Rat(-1)) throw DomainError("difference offset must exceed -1");
    if (seats < 1) throw DomainError("seats must be >= 1");
    long long n = tallies.ballot_count();
    if (n <= 0) throw DomainError("no ballots");
    Rat ta(tallies.entity_total(a));
    Rat tb(tallies.entity_total(b));
    Rat tl(tallies.total_votes);
    Rat v(tallies.valid_ballots);
    Rat i(tallies.invalid_ballots);
    Rat s(seats);
    Rat one_plus_d = Rat(1) + d;
    Rat valid_part = (ta - tb - tl * d + v * s * one_plus_d) / (Rat(2) * s * one_plus_d);
    return (valid_part + i / Rat(2)) / Rat(n);
}

/// Aggregate mean for the assertion kinds that have a closed form; empty
/// otherwise. `seats` is the contest's S.
inline std::optional<Rat> aggregate_mean(const LinearAssertion& assertion,
                                         const Tallies& tallies, int seats) {
    if (assertion.kind == AssertionKind::supermajority) {
        Rat t = -assertion.total_coeff;
        const std::string* entity = nullptr;
        for (const auto& [id, coeff] : assertion.entity_coeffs)
            if (coeff == Rat(1) && assertion.entity_coeffs.size() == 1) entity = &id;
        if (entity && t.sign() > 0)
            return aggregate_mean_supermajority(tallies, *entity, t);
        return std::nullopt;
    }
    if (assertion.kind == AssertionKind::pairwise_diff) {
        Rat d = -assertion.total_coeff;
        if (d <= Rat(-1)) return std::nullopt;
        const std::string* pos = nullptr;
        const std::string* neg = nullptr;
        if (assertion.entity_coeffs.size() == 2) {
            for (const auto& [id, coeff] : assertion.entity_coeffs) {
                if (coeff == Rat(1)) pos = &id;
                if (coeff == Rat(-1)) neg = &id;
            }
        }
        if (pos && neg) return aggregate_mean_pairwise_diff(tallies, *pos, *neg, d, seats);
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace plaudit
