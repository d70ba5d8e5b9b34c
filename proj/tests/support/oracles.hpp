#pragma once

// Brute-force reference implementations for oracle testing. These follow
// the table definitions literally (materialize, sort, cut) so they share
// no code path with the library's incremental algorithms.

#include <plaudit/model.hpp>
#include <plaudit/rational.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace testsupport {

struct TableAllocation {
    bool tie = false;  // the S-th and (S+1)-th largest entries are equal
    std::map<std::string, int> seats;
    std::map<std::string, std::optional<int>> winner_index;
    std::map<std::string, std::optional<int>> loser_index;
};

/// Literal highest-averages: build all |E| x S averages, sort them, take
/// the top S. Boundary equality marks a tie instead of throwing.
inline TableAllocation brute_force_highest_averages(
    const std::map<std::string, long long>& party_tallies, int seats,
    const std::vector<plaudit::Rat>& divisors) {
    using plaudit::Rat;
    struct Entry {
        Rat value;
        std::string party;
        int seat;
    };
    std::vector<Entry> entries;
    for (const auto& [party, votes] : party_tallies)
        for (int s = 1; s <= seats; ++s)
            entries.push_back({Rat(votes) / divisors[static_cast<std::size_t>(s - 1)], party, s});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.value != b.value) return b.value < a.value;
        return std::tie(a.party, a.seat) < std::tie(b.party, b.seat);
    });

    TableAllocation out;
    std::size_t cut = static_cast<std::size_t>(seats);
    if (cut < entries.size() && entries[cut - 1].value == entries[cut].value) {
        out.tie = true;
        return out;
    }
    for (const auto& [party, votes] : party_tallies) out.seats[party] = 0;
    for (std::size_t i = 0; i < cut; ++i) ++out.seats[entries[i].party];
    for (const auto& [party, won] : out.seats) {
        std::optional<int> w;
        std::optional<int> l;
        for (int s = 1; s <= seats; ++s) {
            bool selected = false;
            for (std::size_t i = 0; i < cut; ++i)
                selected = selected || (entries[i].party == party && entries[i].seat == s);
            if (selected) {
                if (!w || *w < s) w = s;
            } else if (!l || *l > s) {
                l = s;
            }
        }
        out.winner_index[party] = w;
        out.loser_index[party] = l;
    }
    return out;
}

/// Literal largest remainder: exact quotas, floors, then sort remainders.
/// Ties at the cut are marked, not broken.
struct RemainderAllocation {
    bool tie = false;
    std::map<std::string, int> seats;
};

inline RemainderAllocation brute_force_hamilton(const std::map<std::string, long long>& tallies,
                                                long long total_votes, int seats) {
    using plaudit::Rat;
    RemainderAllocation out;
    std::vector<std::pair<Rat, std::string>> rest;
    int assigned = 0;
    for (const auto& [party, votes] : tallies) {
        Rat quota = Rat(votes) * Rat(seats) / Rat(total_votes);
        int fl = quota.floor().convert_to<int>();
        out.seats[party] = fl;
        assigned += fl;
        rest.emplace_back(quota - Rat(quota.floor()), party);
    }
    int leftover = seats - assigned;
    std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return b.first < a.first;
        return a.second < b.second;
    });
    if (leftover > 0) {
        std::size_t k = static_cast<std::size_t>(leftover);
        if (k < rest.size() && rest[k - 1].first == rest[k].first) {
            out.tie = true;
            return out;
        }
        for (std::size_t i = 0; i < k; ++i) ++out.seats[rest[i].second];
    }
    return out;
}

}  // namespace testsupport
