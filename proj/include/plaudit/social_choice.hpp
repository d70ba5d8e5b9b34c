#pragma once

#include "plaudit/model.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace plaudit {

/// Result of largest-remainder apportionment.
struct HamiltonAllocation {
    std::map<std::string, int> floor_seats;   // s_e = floor(S * p_e)
    std::map<std::string, Rat> remainders;    // r_e = S * p_e - s_e
    int leftover_seats = 0;                   // k
    std::set<std::string> remainder_winners;  // the k parties rounded up
    std::map<std::string, int> final_seats;   // a_e

    bool operator==(const HamiltonAllocation&) const = default;
};

/// Largest-remainder (Hamilton) apportionment over party totals, with
/// exact rational quotas. Throws TieError when the k-th and (k+1)-th
/// greatest remainders are equal, because the rounding step is then
/// undecidable without an external tie-break.
inline HamiltonAllocation hamilton_allocate(const Tallies& tallies, int seats) {
    if (seats < 1) throw PreconditionError("hamilton_allocate: seats must be >= 1");
    if (tallies.total_votes <= 0)
        throw PreconditionError("hamilton_allocate: no votes to apportion");
    if (tallies.per_party.empty())
        throw PreconditionError("hamilton_allocate: no parties");

    HamiltonAllocation out;
    int floor_total = 0;
    std::vector<std::pair<Rat, std::string>> by_remainder;
    for (const auto& [party, votes] : tallies.per_party) {
        Rat quota = Rat(static_cast<long long>(seats) * votes) / Rat(tallies.total_votes);
        BigInt fl = quota.floor();
        int s = fl.convert_to<int>();
        out.floor_seats[party] = s;
        out.remainders[party] = quota - Rat(fl);
        floor_total += s;
        by_remainder.emplace_back(out.remainders[party], party);
    }
    out.leftover_seats = seats - floor_total;
    out.final_seats = out.floor_seats;

    if (out.leftover_seats > 0) {
        std::sort(by_remainder.begin(), by_remainder.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return b.first < a.first;
            return a.second < b.second;
        });
        std::size_t k = static_cast<std::size_t>(out.leftover_seats);
        if (k < by_remainder.size() && by_remainder[k - 1].first == by_remainder[k].first)
            throw TieError("remainder tie at the rounding cut between '" +
                           by_remainder[k - 1].second + "' and '" + by_remainder[k].second +
                           "'");
        for (std::size_t i = 0; i < k; ++i) {
            out.remainder_winners.insert(by_remainder[i].second);
            ++out.final_seats[by_remainder[i].second];
        }
    }
    return out;
}

/// Result of a highest-averages (divisor method) allocation. The winning
/// table entries of each party always form a prefix of its row, so the
/// highest winning index equals the seat count.
struct HighestAveragesAllocation {
    std::map<std::string, int> seats;
    std::map<std::string, std::optional<int>> winner_index;  // W_e, empty if no seat
    std::map<std::string, std::optional<int>> loser_index;   // L_e, empty if all seats
    std::vector<std::pair<std::string, int>> winning_set;    // (party, seat index)

    bool operator==(const HighestAveragesAllocation&) const = default;
};

namespace detail {

inline HighestAveragesAllocation indices_from_seats(const std::map<std::string, int>& seats,
                                                    int total_seats) {
    HighestAveragesAllocation out;
    out.seats = seats;
    for (const auto& [party, s] : seats) {
        out.winner_index[party] = s > 0 ? std::optional<int>(s) : std::nullopt;
        out.loser_index[party] = s < total_seats ? std::optional<int>(s + 1) : std::nullopt;
        for (int i = 1; i <= s; ++i) out.winning_set.emplace_back(party, i);
    }
    return out;
}

}  // namespace detail

/// Allocates seats by awarding each seat to the party with the greatest
/// next average T_e / d(s_e + 1), with exact comparisons. Equal entries
/// are awarded together when they all fit; a tie that straddles the seat
/// cut (the S-th and (S+1)-th largest table entries are equal) throws
/// TieError.
inline HighestAveragesAllocation highest_averages_allocate(const Tallies& tallies, int seats,
                                                           const std::vector<Rat>& divisors) {
    if (seats < 1) throw PreconditionError("highest_averages_allocate: seats must be >= 1");
    if (tallies.total_votes <= 0)
        throw PreconditionError("highest_averages_allocate: no votes to allocate");
    if (static_cast<int>(divisors.size()) < seats)
        throw PreconditionError("highest_averages_allocate: need one divisor per seat");
    for (std::size_t i = 0; i < static_cast<std::size_t>(seats); ++i) {
        if (divisors[i].sign() <= 0)
            throw PreconditionError("highest_averages_allocate: divisors must be positive");
        if (i > 0 && divisors[i] < divisors[i - 1])
            throw PreconditionError("highest_averages_allocate: divisors must be nondecreasing");
    }

    std::map<std::string, int> won;
    for (const auto& [party, votes] : tallies.per_party) won[party] = 0;

    int awarded = 0;
    while (awarded < seats) {
        // Best next average among parties that can still take a seat.
        std::optional<Rat> best;
        for (const auto& [party, s] : won) {
            if (s >= seats) continue;
            Rat f = Rat(tallies.per_party.at(party)) / divisors[static_cast<std::size_t>(s)];
            if (!best || *best < f) best = f;
        }
        // T_L > 0 guarantees some party still has positive entries left.
        // Count, per tied party, the run of consecutive equal entries; with
        // nondecreasing divisors these are exactly its table entries at the
        // tied value.
        std::vector<std::pair<std::string, int>> runs;
        int total_run = 0;
        for (const auto& [party, s] : won) {
            if (s >= seats) continue;
            int run = 0;
            for (int i = s; i < seats; ++i) {
                Rat f = Rat(tallies.per_party.at(party)) / divisors[static_cast<std::size_t>(i)];
                if (f == *best)
                    ++run;
                else
                    break;
            }
            if (run > 0) {
                runs.emplace_back(party, run);
                total_run += run;
            }
        }
        if (total_run > seats - awarded) {
            std::string who;
            for (const auto& [party, run] : runs) who += (who.empty() ? "'" : ", '") + party + "'";
            throw TieError("table tie at the seat cut among " + who);
        }
        for (const auto& [party, run] : runs) won[party] += run;
        awarded += total_run;
    }
    return detail::indices_from_seats(won, seats);
}

/// Builds the winner/loser table indices a reported seat vector claims.
/// Used to audit a reported highest-averages outcome without recomputing it.
inline HighestAveragesAllocation highest_averages_from_reported(
    const std::map<std::string, int>& reported_seats, int seats) {
    int total = 0;
    for (const auto& [party, s] : reported_seats) {
        if (s < 0)
            throw PreconditionError("reported seats for '" + party + "' are negative");
        total += s;
    }
    if (total != seats)
        throw PreconditionError("reported seats sum to " + std::to_string(total) +
                                ", expected " + std::to_string(seats));
    return detail::indices_from_seats(reported_seats, seats);
}

/// Top `seats_won` candidates of one party by individual tally.
/// TieError when the boundary is tied.
inline std::set<std::string> within_party_winners(
    const std::map<std::string, long long>& candidate_tallies, int seats_won) {
    if (seats_won < 0) throw PreconditionError("within_party_winners: negative seat count");
    if (seats_won > static_cast<int>(candidate_tallies.size()))
        throw PreconditionError("within_party_winners: more seats than candidates");
    if (seats_won == 0) return {};

    std::vector<std::pair<long long, std::string>> order;
    for (const auto& [cand, votes] : candidate_tallies) order.emplace_back(votes, cand);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::size_t k = static_cast<std::size_t>(seats_won);
    if (k < order.size() && order[k - 1].first == order[k].first)
        throw TieError("tie at the last seat between '" + order[k - 1].second + "' and '" +
                       order[k].second + "'");
    std::set<std::string> winners;
    for (std::size_t i = 0; i < k; ++i) winners.insert(order[i].second);
    return winners;
}

/// Single winner by simple plurality. TieError on a tied top tally.
inline std::string plurality_winner(const std::map<std::string, long long>& tallies) {
    if (tallies.empty()) throw PreconditionError("plurality_winner: no candidates");
    std::optional<std::string> best;
    long long best_votes = -1;
    bool tied = false;
    for (const auto& [cand, votes] : tallies) {
        if (votes > best_votes) {
            best = cand;
            best_votes = votes;
            tied = false;
        } else if (votes == best_votes) {
            tied = true;
        }
    }
    if (best_votes <= 0) throw PreconditionError("plurality_winner: no votes cast");
    if (tied) throw TieError("tied plurality winner at " + std::to_string(best_votes) + " votes");
    return *best;
}

inline std::string plurality_winner(const Tallies& tallies) {
    return plurality_winner(tallies.per_candidate);
}

/// Whether `winner` exceeds the share threshold: T_w > t * T_L, exactly.
inline bool supermajority_met(const Tallies& tallies, const std::string& winner,
                              const Rat& threshold) {
    if (threshold <= Rat(0) || threshold >= Rat(1))
        throw PreconditionError("supermajority threshold must be in (0, 1)");
    return Rat(tallies.entity_total(winner)) > threshold * Rat(tallies.total_votes);
}

inline std::vector<Rat> dhondt_divisors(int seats) {
    std::vector<Rat> d;
    for (int i = 1; i <= seats; ++i) d.emplace_back(i);
    return d;
}

inline std::vector<Rat> sainte_lague_divisors(int seats) {
    std::vector<Rat> d;
    for (int i = 1; i <= seats; ++i) d.emplace_back(2 * i - 1);
    return d;
}

}  // namespace plaudit
