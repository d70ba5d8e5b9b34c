#pragma once

#include "plaudit/model.hpp"
#include "plaudit/social_choice.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace plaudit {

enum class AssertionKind { pairwise, supermajority, pairwise_diff, dhondt_pair, within_party };

inline const char* to_string(AssertionKind k) {
    switch (k) {
        case AssertionKind::pairwise: return "pairwise";
        case AssertionKind::supermajority: return "supermajority";
        case AssertionKind::pairwise_diff: return "pairwise_diff";
        case AssertionKind::dhondt_pair: return "dhondt_pair";
        case AssertionKind::within_party: return "within_party";
    }
    return "?";
}

inline AssertionKind assertion_kind_from_string(const std::string& s) {
    if (s == "pairwise") return AssertionKind::pairwise;
    if (s == "supermajority") return AssertionKind::supermajority;
    if (s == "pairwise_diff") return AssertionKind::pairwise_diff;
    if (s == "dhondt_pair") return AssertionKind::dhondt_pair;
    if (s == "within_party") return AssertionKind::within_party;
    throw ParseError("unknown assertion kind '" + s + "'");
}

/// One linear claim about the true tallies:
///   sum_e entity_coeffs[e] * T_e  +  total_coeff * T_L  >  0.
/// Entities may be parties or candidates. The whole outcome-verification
/// strategy reduces to a set of these.
struct LinearAssertion {
    std::map<std::string, Rat> entity_coeffs;
    Rat total_coeff;  // multiplies T_L; carries the share/threshold terms
    std::string label;
    AssertionKind kind = AssertionKind::pairwise;

    bool operator==(const LinearAssertion&) const = default;
};

/// Exact left-hand side of the assertion inequality on given tallies.
inline Rat assertion_value(const LinearAssertion& a, const Tallies& tallies) {
    Rat v;
    for (const auto& [entity, coeff] : a.entity_coeffs)
        v += coeff * Rat(tallies.entity_total(entity));
    if (!a.total_coeff.is_zero()) v += a.total_coeff * Rat(tallies.total_votes);
    return v;
}

/// True iff the strict inequality holds on these tallies.
inline bool evaluate(const LinearAssertion& a, const Tallies& tallies) {
    return assertion_value(a, tallies).sign() > 0;
}

/// A set of assertions that jointly certify one reported outcome.
struct AssertionSet {
    std::vector<LinearAssertion> assertions;
    std::string sufficiency_note;  // why the set implies the outcome

    void validate() const {
        std::set<std::string> labels;
        for (const auto& a : assertions) {
            if (a.label.empty()) throw ValidationError("assertion with empty label");
            if (!labels.insert(a.label).second)
                throw ValidationError("duplicate assertion label '" + a.label + "'");
        }
    }

    bool operator==(const AssertionSet&) const = default;
};

namespace detail {

inline std::string signed_rat(const Rat& r) {
    return (r.sign() < 0 ? "- " + (-r).str() : "+ " + r.str());
}

// No range check on t: internal callers may emit boundary thresholds
// (t = 1 when a party holds every seat's worth of votes). Such an
// assertion is honest, just unwinnable by sampling.
inline LinearAssertion make_supermajority(const std::string& entity, const Rat& t) {
    LinearAssertion a;
    a.entity_coeffs[entity] = Rat(1);
    a.total_coeff = -t;
    a.kind = AssertionKind::supermajority;
    a.label = "p(" + entity + ") > " + t.str();
    return a;
}

}  // namespace detail

/// T_A > T_B, i.e. A beat B outright.
inline LinearAssertion pairwise_assertion(const std::string& a, const std::string& b) {
    if (a == b) throw PreconditionError("pairwise assertion needs two distinct entities");
    LinearAssertion out;
    out.entity_coeffs[a] = Rat(1);
    out.entity_coeffs[b] = Rat(-1);
    out.kind = AssertionKind::pairwise;
    out.label = "T(" + a + ") > T(" + b + ")";
    return out;
}

/// p_e > t for a fixed share threshold t in (0, 1).
inline LinearAssertion supermajority_assertion(const std::string& entity, const Rat& t) {
    if (t <= Rat(0) || t >= Rat(1))
        throw PreconditionError("supermajority threshold must be in (0, 1)");
    return detail::make_supermajority(entity, t);
}

/// p_A > p_B + d for a rational offset d > -1 (d may be negative).
inline LinearAssertion pairwise_diff_assertion(const std::string& a, const std::string& b,
                                               const Rat& d) {
    if (a == b) throw PreconditionError("pairwise difference needs two distinct entities");
    if (d <= Rat(-1)) throw PreconditionError("pairwise difference offset must exceed -1");
    LinearAssertion out;
    out.entity_coeffs[a] = Rat(1);
    out.entity_coeffs[b] = Rat(-1);
    out.total_coeff = -d;
    out.kind = AssertionKind::pairwise_diff;
    out.label = "p(" + a + ") > p(" + b + ") " + detail::signed_rat(d);
    return out;
}

/// Assertions certifying every seat of a reported largest-remainder
/// allocation: for each ordered pair of parties (m, n),
///   p_m > p_n + (a_m - a_n - 1) / S.
/// Together these pin the whole seat vector, because any other vector
/// summing to S must move a seat from some party to another, and that
/// pair's inequality fails. Pairs whose offset is -1 or below are
/// implied by validity of the tallies; `prune_trivial` drops them.
inline AssertionSet hamilton_all_seats_assertions(const ReportedOutcome& reported, int seats,
                                                  bool prune_trivial = false) {
    if (seats < 1) throw PreconditionError("seats must be >= 1");
    int total = 0;
    for (const auto& [party, n] : reported.party_seats) total += n;
    if (total != seats)
        throw PreconditionError("reported seats sum to " + std::to_string(total) +
                                ", expected " + std::to_string(seats));

    AssertionSet set;
    set.sufficiency_note =
        "Every ordered party pair (m, n) asserts p_m > p_n + (a_m - a_n - 1)/S. If the "
        "true apportionment moved any seat relative to the reported one, the pair taking "
        "from m and giving to n would violate its inequality, so the set certifies the "
        "exact seat vector.";
    for (const auto& [m, am] : reported.party_seats) {
        for (const auto& [n, an] : reported.party_seats) {
            if (m == n) continue;
            Rat d = Rat(am - an - 1) / Rat(seats);
            if (prune_trivial && d <= Rat(-1)) continue;
            LinearAssertion a;
            a.entity_coeffs[m] = Rat(1);
            a.entity_coeffs[n] = Rat(-1);
            a.total_coeff = -d;
            a.kind = AssertionKind::pairwise_diff;
            a.label = "p(" + m + ") > p(" + n + ") " + detail::signed_rat(d);
            set.assertions.push_back(std::move(a));
        }
    }
    return set;
}

/// At-least-delta assertions from reported tallies: with the full quota
/// q = T_L / S and delta_e = floor(T_e / q), each party with delta_e >= 1
/// asserts the supermajority p_e > delta_e / S. These certify floor seats
/// only, not the remainder seats.
inline AssertionSet hamilton_abr_assertions(const Tallies& tallies, int seats) {
    if (seats < 1) throw PreconditionError("seats must be >= 1");
    if (tallies.total_votes <= 0) throw PreconditionError("no votes tallied");

    AssertionSet set;
    set.sufficiency_note =
        "Each asserted share p_e > delta_e/S guarantees party e at least delta_e seats "
        "under largest remainders. The set bounds every party's floor seats from below "
        "and says nothing about the remainder seats.";
    Rat quota = Rat(tallies.total_votes) / Rat(seats);
    for (const auto& [party, votes] : tallies.per_party) {
        BigInt delta = (Rat(votes) / quota).floor();
        if (delta < 1) continue;
        Rat t = quota * Rat(delta) / Rat(tallies.total_votes);
        set.assertions.push_back(detail::make_supermajority(party, t));
    }
    return set;
}

/// Assertions certifying a highest-averages outcome: for each party A that
/// won a seat and each other party B that lost one,
///   T_A / d(W_A) > T_B / d(L_B),
/// where W_A is A's last winning table entry and L_B is B's first losing
/// one. Holding all of them forces the reported winning set.
inline AssertionSet dhondt_assertions(const HighestAveragesAllocation& alloc,
                                      const std::vector<Rat>& divisors) {
    AssertionSet set;
    set.sufficiency_note =
        "Every reported winning table entry is asserted to beat every reported losing "
        "entry with the smallest winning-to-losing gap: T_A/d(W_A) > T_B/d(L_B) for each "
        "ordered pair. Rows decrease along divisors, so these pairs imply all others and "
        "pin the winning set exactly.";
    for (const auto& [a, wa] : alloc.winner_index) {
        if (!wa) continue;
        if (static_cast<std::size_t>(*wa) > divisors.size())
            throw PreconditionError("winner index beyond the divisor list");
        for (const auto& [b, lb] : alloc.loser_index) {
            if (!lb || a == b) continue;
            if (static_cast<std::size_t>(*lb) > divisors.size())
                throw PreconditionError("loser index beyond the divisor list");
            LinearAssertion as;
            as.entity_coeffs[a] = Rat(1) / divisors[static_cast<std::size_t>(*wa) - 1];
            as.entity_coeffs[b] = -(Rat(1) / divisors[static_cast<std::size_t>(*lb) - 1]);
            as.kind = AssertionKind::dhondt_pair;
            as.label = "f(" + a + "," + std::to_string(*wa) + ") > f(" + b + "," +
                       std::to_string(*lb) + ")";
            set.assertions.push_back(std::move(as));
        }
    }
    return set;
}

/// Assertions certifying one party's reported seat-takers: every reported
/// winner beat every non-winner on the same list.
inline AssertionSet within_party_assertions(const PartyList& party,
                                            const std::set<std::string>& winners) {
    for (const auto& w : winners) {
        bool found = false;
        for (const auto& c : party.candidates) found = found || c == w;
        if (!found)
            throw PreconditionError("winner '" + w + "' is not on the list of '" +
                                    party.party_id + "'");
    }
    AssertionSet set;
    set.sufficiency_note =
        "Each reported winner of the list is asserted to out-poll each reported "
        "non-winner, which is exactly the multi-winner plurality outcome.";
    for (const auto& w : winners) {
        for (const auto& c : party.candidates) {
            if (winners.count(c) != 0) continue;
            LinearAssertion a;
            a.entity_coeffs[w] = Rat(1);
            a.entity_coeffs[c] = Rat(-1);
            a.kind = AssertionKind::within_party;
            a.label = "T(" + w + ") > T(" + c + ")";
            set.assertions.push_back(std::move(a));
        }
    }
    return set;
}

}  // namespace plaudit
