#include <catch2/catch_amalgamated.hpp>

#include <plaudit/assorters.hpp>
#include <plaudit/social_choice.hpp>

#include "support/generators.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

using namespace plaudit;

namespace {

ContestSpec tri_spec() {
    ContestSpec s;
    s.name = "tri";
    s.scf_kind = ScfKind::plurality;
    s.seats = 1;
    s.max_votes_per_candidate = 1;
    s.max_votes_per_ballot = 1;
    s.parties = {{"pa", {"A"}}, {"pb", {"B"}}, {"pc", {"C"}}};
    s.validate();
    return s;
}

ContestSpec free_list_spec(int seats) {
    ContestSpec s;
    s.name = "list";
    s.scf_kind = ScfKind::hamilton_free_list;
    s.seats = seats;
    s.max_votes_per_candidate = std::min(3, seats);
    s.max_votes_per_ballot = seats;
    s.parties = {{"pa", {"A"}}, {"pb", {"B"}}, {"pc", {"C"}}};
    s.validate();
    return s;
}

InterpretedBallot vote(const std::string& cand, long long n = 1) {
    InterpretedBallot b;
    b.ballot_id = "x";
    if (n != 0) b.votes[cand] = n;
    return b;
}

InterpretedBallot multi(std::map<std::string, long long> votes) {
    InterpretedBallot b;
    b.ballot_id = "x";
    b.votes = std::move(votes);
    return b;
}

InterpretedBallot spoiled() {
    InterpretedBallot b;
    b.ballot_id = "x";
    b.valid = false;
    return b;
}

}  // namespace

TEST_CASE("proto values score ballots linearly and spoiled ballots zero") {
    EntityIndex idx(tri_spec());

    LinearAssertion ab = pairwise_assertion("A", "B");
    CHECK(proto_value(ab, vote("A"), idx) == Rat(1));
    CHECK(proto_value(ab, vote("B"), idx) == Rat(-1));
    CHECK(proto_value(ab, vote("C"), idx) == Rat(0));
    CHECK(proto_value(ab, spoiled(), idx) == Rat(0));

    LinearAssertion super = supermajority_assertion("A", Rat(2, 3));
    CHECK(proto_value(super, vote("A"), idx) == Rat(1, 3));
    CHECK(proto_value(super, vote("C"), idx) == Rat(-2, 3));
    CHECK(proto_value(super, spoiled(), idx) == Rat(0));

    // Party entities aggregate member candidates.
    ContestSpec lists = free_list_spec(12);
    lists.parties = {{"PA", {"A", "A2"}}, {"PB", {"B"}}, {"PC", {"C"}}};
    EntityIndex lidx(lists);
    LinearAssertion diff = pairwise_diff_assertion("PA", "PB", Rat(1, 5));
    InterpretedBallot b = multi({{"A", 3}, {"A2", 2}, {"B", 4}, {"C", 3}});
    CHECK(proto_value(diff, b, lidx) == Rat(5) - Rat(4) - Rat(12, 5));
}

TEST_CASE("proto bounds cover the reachable ballot range") {
    VoteBounds one = VoteBounds::uniform(Rat(1));
    CHECK(proto_lower_bound(pairwise_assertion("A", "B"), one) == Rat(-1));
    CHECK(proto_upper_bound(pairwise_assertion("A", "B"), one) == Rat(1));

    LinearAssertion super = supermajority_assertion("A", Rat(2, 3));
    CHECK(proto_lower_bound(super, one) == Rat(-2, 3));
    CHECK(proto_upper_bound(super, one) == Rat(1));

    VoteBounds twelve = VoteBounds::uniform(Rat(12));
    LinearAssertion pos = pairwise_diff_assertion("A", "B", Rat(1, 5));
    CHECK(proto_lower_bound(pos, twelve) == Rat(-72, 5));  // -(12 + 12/5)
    CHECK(proto_upper_bound(pos, twelve) == Rat(12));

    // For a negative offset the two negative terms share the ballot, so the
    // joint bound -(1+d) * min(cap_B, cap_T) applies instead of the sum.
    LinearAssertion negd = pairwise_diff_assertion("A", "B", Rat(-1, 2));
    CHECK(proto_lower_bound(negd, twelve) == Rat(-6));

    VoteBounds capped = twelve;
    capped.entity_overrides["B"] = Rat(4);
    CHECK(proto_lower_bound(negd, capped) == Rat(-2));

    // A scaled assertion does not match the two-coefficient shape and falls
    // back to summing independent minima.
    LinearAssertion scaled = negd;
    scaled.entity_coeffs["A"] = Rat(2);
    scaled.entity_coeffs["B"] = Rat(-2);
    CHECK(proto_lower_bound(scaled, twelve) == Rat(-24));

    // Bounds stay on their side of zero even for one-sided assertions.
    LinearAssertion up;
    up.entity_coeffs["A"] = Rat(1);
    up.label = "up";
    CHECK(proto_lower_bound(up, twelve) == Rat(0));
    LinearAssertion down;
    down.entity_coeffs["B"] = Rat(-1);
    down.label = "down";
    CHECK(proto_upper_bound(down, twelve) == Rat(0));
}

TEST_CASE("pairwise assorter is the familiar one-zero-half scale") {
    EntityIndex idx(tri_spec());
    Assorter h = assorterize(pairwise_assertion("A", "B"), VoteBounds::uniform(Rat(1)));
    CHECK(h.lower_bound == Rat(-1));
    CHECK(h.scale == Rat(1, 2));
    CHECK(h.upper_bound == Rat(1));

    CHECK(h.value(vote("A"), idx) == Rat(1));
    CHECK(h.value(vote("B"), idx) == Rat(0));
    CHECK(h.value(vote("C"), idx) == Rat(1, 2));
    CHECK(h.value(spoiled(), idx) == Rat(1, 2));

    std::vector<InterpretedBallot> ballots{vote("A"), vote("A"), vote("A"), vote("B")};
    MeanMargin mm = assorter_mean_margin(h, ballots, idx);
    CHECK(mm.mean == Rat(3, 4));
    CHECK(mm.margin == Rat(1, 2));
}

TEST_CASE("supermajority assorter rescales to 1/(2t)") {
    EntityIndex idx(tri_spec());
    Assorter h = assorterize(supermajority_assertion("A", Rat(2, 3)), VoteBounds::uniform(Rat(1)));
    CHECK(h.scale == Rat(3, 4));  // -1/(2 * -2/3)
    CHECK(h.value(vote("A"), idx) == Rat(3, 4));
    CHECK(h.value(vote("B"), idx) == Rat(0));
    CHECK(h.value(spoiled(), idx) == Rat(1, 2));
}

TEST_CASE("share-difference assorter matches its closed form") {
    ContestSpec spec = free_list_spec(5);
    EntityIndex idx(spec);
    VoteBounds bounds = VoteBounds::from_spec(spec);

    for (const Rat& d : {Rat(1, 5), Rat(-2, 5)}) {
        Assorter h = assorterize(pairwise_diff_assertion("pa", "pb", d), bounds);
        Rat denom = Rat(2) * Rat(5) * (Rat(1) + d);  // 2 m_L (1+d)
        for (const auto& b : {multi({{"A", 3}, {"B", 2}}), multi({{"B", 5}}),
                              multi({{"A", 1}, {"C", 4}}), multi({}), multi({{"A", 5}})}) {
            Rat g = proto_value(h.assertion, b, idx);
            INFO("d=" << d.str() << " g=" << g.str());
            CHECK(h.value(b, idx) == (g + Rat(5) * (Rat(1) + d)) / denom);
        }
    }

    // When the lower bound already clears -1/2 the scale stays at 1 and the
    // closed form above no longer applies; the assorter is still valid.
    Assorter mild =
        assorterize(pairwise_diff_assertion("pa", "pb", Rat(-3, 5)), VoteBounds::uniform(Rat(1)));
    CHECK(mild.lower_bound == Rat(-2, 5));
    CHECK(mild.scale == Rat(1));
    CHECK(mild.value(vote("A"), EntityIndex(tri_spec())) == Rat(21, 10));
    CHECK(mild.value(vote("B"), EntityIndex(tri_spec())) == Rat(1, 10));
    CHECK(mild.upper_bound == Rat(21, 10));
}

TEST_CASE("divisor pair assorters score on the d(L)/(2m) grid") {
    ContestSpec spec;
    spec.name = "council";
    spec.scf_kind = ScfKind::highest_averages;
    spec.seats = 8;
    spec.max_votes_per_candidate = 3;
    spec.max_votes_per_ballot = 3;
    spec.divisors = dhondt_divisors(8);
    spec.parties = {{"A", {"A1"}}, {"B", {"B1"}}, {"C", {"C1"}}};
    spec.validate();
    EntityIndex idx(spec);

    Tallies t;
    t.per_party = {{"A", 100}, {"B", 80}, {"C", 30}};
    t.total_votes = 210;
    HighestAveragesAllocation alloc = highest_averages_allocate(t, 8, spec.divisors);

    // (A over B): A's 4th entry against B's 4th, single-vote ballots.
    Assorter ab = dhondt_assorter("A", "B", alloc, spec.divisors, 1);
    CHECK(ab.scale == Rat(2));  // d(L_B)/(2m) = 4/2
    CHECK(ab.value(vote("A1"), idx) == Rat(1));
    CHECK(ab.value(vote("B1"), idx) == Rat(0));
    CHECK(ab.value(vote("C1"), idx) == Rat(1, 2));
    CHECK(ab.value(spoiled(), idx) == Rat(1, 2));
    CHECK(ab.upper_bound == Rat(1));

    // (C over A): C's 1st entry against A's 5th stretches the scale to 3.
    Assorter ca = dhondt_assorter("C", "A", alloc, spec.divisors, 1);
    CHECK(ca.value(vote("C1"), idx) == Rat(3));
    CHECK(ca.value(vote("A1"), idx) == Rat(0));
    CHECK(ca.value(vote("B1"), idx) == Rat(1, 2));
    CHECK(ca.upper_bound == Rat(3));

    // Multi-vote ballots land between the extremes:
    // (b_A * d(L_B)/d(W_A) - b_B + m) / (2m) with m = 3.
    Assorter ab3 = dhondt_assorter("A", "B", alloc, spec.divisors, 3);
    CHECK(ab3.value(multi({{"A1", 2}, {"B1", 1}}), idx) == Rat(2, 3));
    CHECK(ab3.value(multi({{"B1", 3}}), idx) == Rat(0));
    CHECK(ab3.value(multi({{"A1", 3}}), idx) == Rat(1));

    CHECK_THROWS_AS(dhondt_assorter("C", "A", alloc, spec.divisors, 0), PreconditionError);
    // B lost its 4th entry, so it cannot anchor a winning side at index 4+.
    HighestAveragesAllocation swept = highest_averages_from_reported({{"A", 8}, {"B", 0}}, 8);
    CHECK_THROWS_AS(dhondt_assorter("B", "A", swept, spec.divisors, 1), PreconditionError);

    // A divisor pair must have a negative side to scale against.
    LinearAssertion onesided;
    onesided.kind = AssertionKind::dhondt_pair;
    onesided.entity_coeffs["A"] = Rat(1, 4);
    onesided.label = "bad";
    CHECK_THROWS_AS(assorterize(onesided, VoteBounds::uniform(Rat(1))), PreconditionError);
}

TEST_CASE("means and margins count spoiled ballots at one half") {
    EntityIndex idx(tri_spec());
    Assorter h = assorterize(pairwise_assertion("A", "B"), VoteBounds::uniform(Rat(1)));

    std::vector<InterpretedBallot> ballots{vote("A"), spoiled()};
    MeanMargin mm = assorter_mean_margin(h, ballots, idx);
    CHECK(mm.mean == Rat(3, 4));
    CHECK(mm.margin == Rat(1, 2));

    CHECK_THROWS_AS(assorter_mean_margin(h, {}, idx), PreconditionError);
}

TEST_CASE("aggregate supermajority mean from tallies alone") {
    // Exactly at the threshold the mean is exactly one half.
    Tallies boundary;
    boundary.per_party = {{"A", 40}, {"B", 60}};
    boundary.total_votes = 100;
    boundary.valid_ballots = 100;
    CHECK(aggregate_mean_supermajority(boundary, "A", Rat(2, 5)) == Rat(1, 2));

    // On single-vote ballots with a threshold of at least one half the
    // closed form equals the per-ballot mean: both scale by 1/(2t).
    ContestSpec spec = tri_spec();
    EntityIndex idx(spec);
    std::vector<InterpretedBallot> ballots;
    for (int i = 0; i < 41; ++i) ballots.push_back(vote("A"));
    for (int i = 0; i < 59; ++i) ballots.push_back(vote("B"));
    for (int i = 0; i < 10; ++i) ballots.push_back(spoiled());
    Tallies t = tallies_from_ballots(ballots, spec);

    LinearAssertion super = supermajority_assertion("A", Rat(3, 5));
    Assorter h = assorterize(super, VoteBounds::from_spec(spec));
    MeanMargin mm = assorter_mean_margin(h, ballots, idx);
    CHECK(mm.mean == Rat(47, 132));
    CHECK(aggregate_mean_supermajority(t, "A", Rat(3, 5)) == mm.mean);
    CHECK(aggregate_mean(super, t, spec.seats) == mm.mean);

    // Below one half the compiled assorter keeps c = 1 while the closed
    // form still scales by 1/(2t), so the two means legitimately diverge;
    // the closed form stays a cross-check, not a definition.
    LinearAssertion low = supermajority_assertion("A", Rat(2, 5));
    Assorter hl = assorterize(low, VoteBounds::from_spec(spec));
    CHECK(hl.scale == Rat(1));
    CHECK(assorter_mean_margin(hl, ballots, idx).mean == Rat(28, 55));
    CHECK(aggregate_mean_supermajority(t, "A", Rat(2, 5)) == Rat(45, 88));

    // Multi-vote ballots break the single-vote normalization: the closed
    // form is then only an approximation to the per-ballot mean.
    ContestSpec lists = free_list_spec(3);
    EntityIndex lidx(lists);
    std::vector<InterpretedBallot> heavy{multi({{"A", 3}}), multi({{"B", 1}})};
    Tallies ht = tallies_from_ballots(heavy, lists);
    LinearAssertion half = supermajority_assertion("pa", Rat(1, 2));
    Assorter hh = assorterize(half, VoteBounds::from_spec(lists));
    Rat perballot = assorter_mean_margin(hh, heavy, lidx).mean;
    Rat aggregate = aggregate_mean_supermajority(ht, "pa", Rat(1, 2));
    CHECK(aggregate == Rat(1));
    CHECK(perballot == Rat(2, 3));
    CHECK(aggregate != perballot);
}

TEST_CASE("aggregate share-difference mean is exact when the vote cap is S") {
    std::mt19937_64 rng(20260814);
    for (int trial = 0; trial < 25; ++trial) {
        testsupport::RandomProfile p = testsupport::random_hamilton_profile(rng);
        EntityIndex idx(p.spec);
        VoteBounds bounds = VoteBounds::from_spec(p.spec);

        std::vector<std::string> parties;
        for (const auto& pl : p.spec.parties) parties.push_back(pl.party_id);
        const std::string& a = parties[rng() % parties.size()];
        const std::string& b = parties[rng() % parties.size()];
        if (a == b) continue;
        long long num = static_cast<long long>(rng() % (2 * p.spec.seats + 1)) - p.spec.seats;
        Rat d(num, p.spec.seats);
        if (d <= Rat(-1)) continue;

        LinearAssertion assertion = pairwise_diff_assertion(a, b, d);
        Assorter h = assorterize(assertion, bounds);
        MeanMargin mm = assorter_mean_margin(h, p.ballots, idx);
        std::optional<Rat> agg = aggregate_mean(assertion, p.tallies, p.spec.seats);
        REQUIRE(agg.has_value());
        INFO("trial " << trial << " pair " << a << "/" << b << " d=" << d.str());
        CHECK(*agg == mm.mean);
    }
}

TEST_CASE("aggregate means exist only for share-based assertion kinds") {
    Tallies t;
    t.per_party = {{"A", 60}, {"B", 40}};
    t.total_votes = 100;
    t.valid_ballots = 100;

    CHECK_FALSE(aggregate_mean(pairwise_assertion("A", "B"), t, 5).has_value());

    LinearAssertion dh;
    dh.kind = AssertionKind::dhondt_pair;
    dh.entity_coeffs["A"] = Rat(1, 4);
    dh.entity_coeffs["B"] = Rat(-1, 5);
    dh.label = "f(A,4) > f(B,5)";
    CHECK_FALSE(aggregate_mean(dh, t, 5).has_value());

    CHECK(aggregate_mean(supermajority_assertion("A", Rat(1, 2)), t, 5).has_value());
    CHECK(aggregate_mean(pairwise_diff_assertion("A", "B", Rat(1, 5)), t, 5).has_value());
}

TEST_CASE("assorters stay within bounds and decide exactly like assertions") {
    std::mt19937_64 rng(97);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        testsupport::RandomProfile p = trial % 2 == 0
                                           ? testsupport::random_hamilton_profile(rng, 4, 6, 80)
                                           : testsupport::random_dhondt_profile(rng, 4, 6, 80);
        EntityIndex idx(p.spec);
        VoteBounds bounds = VoteBounds::from_spec(p.spec);

        std::vector<LinearAssertion> assertions;
        if (p.spec.scf_kind == ScfKind::hamilton_free_list) {
            ReportedOutcome reported;
            try {
                reported.party_seats = hamilton_allocate(p.tallies, p.spec.seats).final_seats;
            } catch (const TieError&) {
                continue;
            }
            if (trial % 4 == 0) testsupport::perturb_seats(reported.party_seats, rng);
            for (auto& a : hamilton_all_seats_assertions(reported, p.spec.seats).assertions)
                assertions.push_back(std::move(a));
            for (auto& a : hamilton_abr_assertions(p.tallies, p.spec.seats).assertions)
                assertions.push_back(std::move(a));
        } else {
            HighestAveragesAllocation alloc;
            try {
                alloc = highest_averages_allocate(p.tallies, p.spec.seats, p.spec.divisors);
            } catch (const TieError&) {
                continue;
            }
            for (auto& a : dhondt_assertions(alloc, p.spec.divisors).assertions)
                assertions.push_back(std::move(a));
        }

        for (const auto& assertion : assertions) {
            Assorter h = assorterize(assertion, bounds);
            REQUIRE(h.scale.sign() > 0);

            Rat sum;
            for (const auto& b : p.ballots) {
                Rat v = h.value(b, idx);
                INFO(assertion.label << " on ballot " << b.ballot_id);
                REQUIRE(Rat(0) <= v);
                REQUIRE(v <= h.upper_bound);
                if (!b.valid) REQUIRE(v == Rat(1, 2));
                sum += v;
            }
            Rat mean = sum / Rat(static_cast<long long>(p.ballots.size()));
            Rat lhs = assertion_value(assertion, p.tallies);
            INFO(assertion.label);
            CHECK((mean > Rat(1, 2)) == (lhs.sign() > 0));
            CHECK((mean == Rat(1, 2)) == (lhs.sign() == 0));
            ++checked;
        }
    }
    CHECK(checked > 100);
}
