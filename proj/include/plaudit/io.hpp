#pragma once

#include "plaudit/assertions.hpp"
#include "plaudit/hesse.hpp"
#include "plaudit/model.hpp"
#include "plaudit/social_choice.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace plaudit {

using Json = nlohmann::json;

/// Fixed-format rendering for doubles in machine output. Infinity prints
/// as the literal "inf"; everything else goes through %.9g so reports are
/// byte-identical across runs.
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline Json rat_to_json(const Rat& r) { return Json(r.str()); }

inline Rat rat_from_json(const Json& j, const std::string& where) {
    try {
        if (j.is_string()) return Rat::parse(j.get<std::string>());
        if (j.is_number_integer()) return Rat(j.get<long long>());
    } catch (const std::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    throw ParseError(where + ": expected an integer or a \"n/d\" string");
}

namespace detail {

inline const Json& require_field(const Json& j, const std::string& key,
                                 const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
    return *it;
}

inline std::string as_string(const Json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError(where + ": expected a string");
    return j.get<std::string>();
}

inline long long as_int(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
    return j.get<long long>();
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace detail

// --- ballot line format ----------------------------------------------------
//
//   ballot_id ; cand=count cand=count ; crossed crossed ; Party
//
// Semicolons separate the four fields; the trailing fields may be empty or
// omitted entirely. '#' starts a comment line, blank lines are skipped.

inline RawHesseBallot parse_ballot_line(const std::string& line, long long line_no = 0) {
    auto fields = detail::split(line, ';');
    if (fields.size() > 4)
        throw InputFormatError(line_no, "too many ';' fields in ballot record");
    RawHesseBallot raw;
    raw.ballot_id = detail::trim(fields[0]);
    if (raw.ballot_id.empty()) throw InputFormatError(line_no, "empty ballot id");

    if (fields.size() > 1) {
        std::istringstream tokens(fields[1]);
        std::string tok;
        while (tokens >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
                throw InputFormatError(line_no, "bad vote token '" + tok + "'");
            std::string cand = tok.substr(0, eq);
            long long count = 0;
            try {
                std::size_t used = 0;
                count = std::stoll(tok.substr(eq + 1), &used);
                if (used != tok.size() - eq - 1) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw InputFormatError(line_no, "bad vote count in '" + tok + "'");
            }
            if (count < 0) throw InputFormatError(line_no, "negative count in '" + tok + "'");
            if (raw.direct_votes.count(cand) != 0)
                throw InputFormatError(line_no, "candidate '" + cand + "' repeated");
            raw.direct_votes[cand] = static_cast<int>(count);
        }
    }
    if (fields.size() > 2) {
        std::istringstream tokens(fields[2]);
        std::string tok;
        while (tokens >> tok) raw.crossed_out.insert(tok);
    }
    if (fields.size() > 3) {
        std::string party = detail::trim(fields[3]);
        if (!party.empty()) raw.party_selection = party;
    }
    return raw;
}

inline std::string format_ballot_line(const RawHesseBallot& raw) {
    std::string line = raw.ballot_id + ";";
    bool first = true;
    for (const auto& [cand, n] : raw.direct_votes) {
        if (!first) line += ' ';
        line += cand + "=" + std::to_string(n);
        first = false;
    }
    line += ";";
    first = true;
    for (const auto& cand : raw.crossed_out) {
        if (!first) line += ' ';
        line += cand;
        first = false;
    }
    line += ";";
    if (raw.party_selection) line += *raw.party_selection;
    return line;
}

inline std::vector<RawHesseBallot> parse_ballot_lines(std::istream& in) {
    std::vector<RawHesseBallot> out;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(parse_ballot_line(t, line_no));
    }
    return out;
}

// --- contest / outcome / ballots as JSON ------------------------------------

inline Json contest_to_json(const ContestSpec& spec) {
    Json j;
    j["name"] = spec.name;
    j["scf"] = to_string(spec.scf_kind);
    j["seats"] = spec.seats;
    j["max_votes_per_candidate"] = spec.max_votes_per_candidate;
    j["max_votes_per_ballot"] = spec.max_votes_per_ballot;
    Json parties = Json::array();
    for (const auto& p : spec.parties)
        parties.push_back(Json{{"id", p.party_id}, {"candidates", p.candidates}});
    j["parties"] = parties;
    if (!spec.divisors.empty()) {
        Json d = Json::array();
        for (const auto& r : spec.divisors) d.push_back(rat_to_json(r));
        j["divisors"] = d;
    }
    if (spec.threshold) j["threshold"] = rat_to_json(*spec.threshold);
    return j;
}

inline ContestSpec contest_from_json(const Json& j) {
    ContestSpec spec;
    spec.name = detail::as_string(detail::require_field(j, "name", "contest"), "contest.name");
    spec.scf_kind =
        scf_kind_from_string(detail::as_string(detail::require_field(j, "scf", "contest"),
                                               "contest.scf"));
    spec.seats = static_cast<int>(
        detail::as_int(detail::require_field(j, "seats", "contest"), "contest.seats"));
    if (j.contains("max_votes_per_candidate"))
        spec.max_votes_per_candidate =
            static_cast<int>(detail::as_int(j["max_votes_per_candidate"],
                                            "contest.max_votes_per_candidate"));
    if (j.contains("max_votes_per_ballot"))
        spec.max_votes_per_ballot = static_cast<int>(
            detail::as_int(j["max_votes_per_ballot"], "contest.max_votes_per_ballot"));
    const Json& parties = detail::require_field(j, "parties", "contest");
    if (!parties.is_array()) throw ParseError("contest.parties: expected an array");
    for (const auto& pj : parties) {
        PartyList p;
        p.party_id = detail::as_string(detail::require_field(pj, "id", "party"), "party.id");
        const Json& cands = detail::require_field(pj, "candidates", "party '" + p.party_id + "'");
        if (!cands.is_array())
            throw ParseError("party '" + p.party_id + "': candidates must be an array");
        for (const auto& c : cands)
            p.candidates.push_back(detail::as_string(c, "party '" + p.party_id + "' candidate"));
        spec.parties.push_back(std::move(p));
    }
    if (j.contains("divisors")) {
        const Json& d = j["divisors"];
        if (d.is_string()) {
            std::string name = d.get<std::string>();
            if (name == "dhondt")
                spec.divisors = dhondt_divisors(spec.seats);
            else if (name == "sainte-lague")
                spec.divisors = sainte_lague_divisors(spec.seats);
            else
                throw ParseError("contest.divisors: unknown divisor rule '" + name + "'");
        } else if (d.is_array()) {
            for (const auto& item : d) spec.divisors.push_back(rat_from_json(item, "divisor"));
        } else {
            throw ParseError("contest.divisors: expected an array or a rule name");
        }
    } else if (spec.scf_kind == ScfKind::highest_averages) {
        spec.divisors = dhondt_divisors(spec.seats);
    }
    if (j.contains("threshold"))
        spec.threshold = rat_from_json(j["threshold"], "contest.threshold");
    spec.validate();
    return spec;
}

inline Json reported_to_json(const ReportedOutcome& r) {
    Json j;
    j["party_seats"] = r.party_seats;
    if (r.floor_seats) j["floor_seats"] = *r.floor_seats;
    if (r.candidate_winners) {
        Json winners;
        for (const auto& [party, set] : *r.candidate_winners)
            winners[party] = std::vector<std::string>(set.begin(), set.end());
        j["candidate_winners"] = winners;
    }
    return j;
}

inline ReportedOutcome reported_from_json(const Json& j) {
    ReportedOutcome r;
    const Json& seats = detail::require_field(j, "party_seats", "reported");
    if (!seats.is_object()) throw ParseError("reported.party_seats: expected an object");
    for (const auto& [id, n] : seats.items())
        r.party_seats[id] = static_cast<int>(detail::as_int(n, "reported.party_seats"));
    if (j.contains("floor_seats")) {
        std::map<std::string, int> fs;
        for (const auto& [id, n] : j["floor_seats"].items())
            fs[id] = static_cast<int>(detail::as_int(n, "reported.floor_seats"));
        r.floor_seats = std::move(fs);
    }
    if (j.contains("candidate_winners")) {
        std::map<std::string, std::set<std::string>> cw;
        for (const auto& [party, arr] : j["candidate_winners"].items()) {
            if (!arr.is_array())
                throw ParseError("reported.candidate_winners: expected arrays of candidates");
            for (const auto& c : arr)
                cw[party].insert(detail::as_string(c, "reported.candidate_winners"));
        }
        r.candidate_winners = std::move(cw);
    }
    return r;
}

inline Json interpreted_ballot_to_json(const InterpretedBallot& b) {
    Json j;
    j["id"] = b.ballot_id;
    j["valid"] = b.valid;
    j["votes"] = b.votes;
    return j;
}

inline InterpretedBallot interpreted_ballot_from_json(const Json& j) {
    InterpretedBallot b;
    b.ballot_id = detail::as_string(detail::require_field(j, "id", "ballot"), "ballot.id");
    if (j.contains("valid")) {
        if (!j["valid"].is_boolean()) throw ParseError("ballot.valid: expected a boolean");
        b.valid = j["valid"].get<bool>();
    }
    if (j.contains("votes")) {
        if (!j["votes"].is_object()) throw ParseError("ballot.votes: expected an object");
        for (const auto& [cand, n] : j["votes"].items()) {
            long long v = detail::as_int(n, "ballot.votes");
            if (v != 0) b.votes[cand] = v;
        }
    }
    return b;
}

inline RawHesseBallot raw_ballot_from_json(const Json& j) {
    RawHesseBallot raw;
    raw.ballot_id = detail::as_string(detail::require_field(j, "id", "ballot"), "ballot.id");
    if (j.contains("direct")) {
        if (!j["direct"].is_object()) throw ParseError("ballot.direct: expected an object");
        for (const auto& [cand, n] : j["direct"].items())
            raw.direct_votes[cand] = static_cast<int>(detail::as_int(n, "ballot.direct"));
    }
    if (j.contains("crossed")) {
        if (!j["crossed"].is_array()) throw ParseError("ballot.crossed: expected an array");
        for (const auto& c : j["crossed"])
            raw.crossed_out.insert(detail::as_string(c, "ballot.crossed"));
    }
    if (j.contains("party"))
        raw.party_selection = detail::as_string(j["party"], "ballot.party");
    return raw;
}

// --- election profile --------------------------------------------------------

/// A contest plus everything needed to audit it: the reported outcome (if
/// announced), the interpreted ballot list, and its tallies. Raw ballots
/// are kept when the profile supplied them, so interpretation can be
/// re-run or exported.
struct ElectionProfile {
    ContestSpec contest;
    std::optional<ReportedOutcome> reported;
    std::vector<InterpretedBallot> ballots;
    std::vector<RawHesseBallot> raw_ballots;
    InterpretationReport interpretation;
    Tallies tallies;
};

inline ElectionProfile parse_profile(const Json& j, const std::string& base_dir = "") {
    ElectionProfile profile;
    profile.contest = contest_from_json(detail::require_field(j, "contest", "profile"));

    bool have_raw = false;
    std::vector<RawHesseBallot> raws;
    if (j.contains("ballot_file")) {
        std::filesystem::path p = detail::as_string(j["ballot_file"], "profile.ballot_file");
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        std::ifstream in(p);
        if (!in) throw ParseError("cannot open ballot file '" + p.string() + "'");
        raws = parse_ballot_lines(in);
        have_raw = true;
    } else if (j.contains("ballots")) {
        const Json& arr = j["ballots"];
        if (!arr.is_array()) throw ParseError("profile.ballots: expected an array");
        bool have_interpreted = false;
        for (const auto& bj : arr) {
            bool raw_shape = bj.contains("direct") || bj.contains("crossed") || bj.contains("party");
            bool interpreted_shape = bj.contains("votes") || bj.contains("valid");
            if (raw_shape && interpreted_shape)
                throw ParseError("ballot mixes raw markings and interpreted votes");
            if (raw_shape) {
                raws.push_back(raw_ballot_from_json(bj));
                have_raw = true;
            } else {
                profile.ballots.push_back(interpreted_ballot_from_json(bj));
                have_interpreted = true;
            }
        }
        if (have_raw && have_interpreted)
            throw ParseError("profile mixes raw and interpreted ballots");
    } else {
        throw ParseError("profile: missing 'ballots' or 'ballot_file'");
    }

    if (have_raw) {
        if (profile.contest.scf_kind != ScfKind::hamilton_free_list)
            throw ValidationError("raw ballot markings require a hamilton_free_list contest");
        auto result = interpret_all(raws, profile.contest);
        profile.raw_ballots = std::move(raws);
        profile.ballots = std::move(result.ballots);
        profile.interpretation = result.report;
    } else {
        profile.interpretation.total = static_cast<long long>(profile.ballots.size());
        for (const auto& b : profile.ballots)
            (b.valid ? profile.interpretation.valid : profile.interpretation.invalid)++;
    }

    std::set<std::string> ids;
    for (const auto& b : profile.ballots)
        if (!ids.insert(b.ballot_id).second)
            throw ValidationError("duplicate ballot id '" + b.ballot_id + "'");

    profile.tallies = tallies_from_ballots(profile.ballots, profile.contest);

    if (j.contains("reported")) {
        profile.reported = reported_from_json(j["reported"]);
        profile.reported->validate(profile.contest);
    }
    return profile;
}

inline ElectionProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open profile '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError("profile '" + path + "': " + e.what());
    }
    try {
        return parse_profile(j, std::filesystem::path(path).parent_path().string());
    } catch (const Json::exception& e) {
        throw ParseError("profile '" + path + "': " + e.what());
    }
}

/// Serializes a profile with its ballots in interpreted form (the raw
/// markings, if any, have already been resolved).
inline Json profile_to_json(const ElectionProfile& profile) {
    Json j;
    j["contest"] = contest_to_json(profile.contest);
    if (profile.reported) j["reported"] = reported_to_json(*profile.reported);
    Json arr = Json::array();
    for (const auto& b : profile.ballots) arr.push_back(interpreted_ballot_to_json(b));
    j["ballots"] = arr;
    return j;
}

// --- assertion sets ----------------------------------------------------------

inline Json assertion_to_json(const LinearAssertion& a) {
    Json j;
    j["label"] = a.label;
    j["kind"] = to_string(a.kind);
    Json coeffs;
    for (const auto& [entity, c] : a.entity_coeffs) coeffs[entity] = rat_to_json(c);
    j["entity_coeffs"] = coeffs;
    j["total_coeff"] = rat_to_json(a.total_coeff);
    return j;
}

inline LinearAssertion assertion_from_json(const Json& j) {
    LinearAssertion a;
    a.label = detail::as_string(detail::require_field(j, "label", "assertion"), "assertion.label");
    a.kind = assertion_kind_from_string(
        detail::as_string(detail::require_field(j, "kind", "assertion"), "assertion.kind"));
    const Json& coeffs = detail::require_field(j, "entity_coeffs", "assertion");
    if (!coeffs.is_object()) throw ParseError("assertion.entity_coeffs: expected an object");
    for (const auto& [entity, c] : coeffs.items())
        a.entity_coeffs[entity] = rat_from_json(c, "assertion.entity_coeffs");
    if (j.contains("total_coeff"))
        a.total_coeff = rat_from_json(j["total_coeff"], "assertion.total_coeff");
    return a;
}

inline Json assertion_set_to_json(const AssertionSet& set) {
    Json j;
    j["sufficiency_note"] = set.sufficiency_note;
    Json arr = Json::array();
    for (const auto& a : set.assertions) arr.push_back(assertion_to_json(a));
    j["assertions"] = arr;
    return j;
}

inline AssertionSet assertion_set_from_json(const Json& j) {
    AssertionSet set;
    if (j.contains("sufficiency_note"))
        set.sufficiency_note = detail::as_string(j["sufficiency_note"], "sufficiency_note");
    const Json& arr = detail::require_field(j, "assertions", "assertion set");
    if (!arr.is_array()) throw ParseError("assertions: expected an array");
    for (const auto& aj : arr) set.assertions.push_back(assertion_from_json(aj));
    set.validate();
    return set;
}

// --- contest summary report ----------------------------------------------------

/// One row of the cross-contest summary: contest shape, audit mode, and
/// the expected sample size at each risk limit (the maximum over the
/// mode's assertions, infinite when any assertion cannot certify).
struct ReportRow {
    std::string contest;
    int seats = 0;
    long long ballots = 0;
    long long parties = 0;
    long long valid = 0;
    std::string mode;
    long long assertion_count = 0;
    std::vector<double> asn;  // parallel to ReportTable::risk_limits
};

struct ReportTable {
    std::vector<double> risk_limits;
    std::vector<ReportRow> rows;
};

inline std::string render_report_csv(const ReportTable& table) {
    std::string out = "contest,seats,ballots,parties,valid,mode,assertions";
    for (double a : table.risk_limits) out += ",asn@" + format_double(a);
    out += "\n";
    for (const auto& row : table.rows) {
        out += row.contest + "," + std::to_string(row.seats) + "," +
               std::to_string(row.ballots) + "," + std::to_string(row.parties) + "," +
               std::to_string(row.valid) + "," + row.mode + "," +
               std::to_string(row.assertion_count);
        for (double v : row.asn) out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

inline std::string render_report_text(const ReportTable& table) {
    std::vector<std::string> headers{"contest", "seats", "ballots", "parties",
                                     "valid",   "mode",  "assertions"};
    for (double a : table.risk_limits) headers.push_back("asn@" + format_double(a));
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : table.rows) {
        std::vector<std::string> r{row.contest,
                                   std::to_string(row.seats),
                                   std::to_string(row.ballots),
                                   std::to_string(row.parties),
                                   std::to_string(row.valid),
                                   row.mode,
                                   std::to_string(row.assertion_count)};
        for (double v : row.asn) r.push_back(format_double(v));
        cells.push_back(std::move(r));
    }
    std::vector<std::size_t> width(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        width[c] = headers[c].size();
        for (const auto& r : cells) width[c] = std::max(width[c], r[c].size());
    }
    std::string out;
    auto emit = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            out += r[c];
            if (c + 1 < r.size()) out += std::string(width[c] - r[c].size() + 2, ' ');
        }
        out += "\n";
    };
    emit(headers);
    for (const auto& r : cells) emit(r);
    return out;
}

inline std::string render_report(const ReportTable& table, const std::string& format) {
    if (format == "csv") return render_report_csv(table);
    if (format == "text") return render_report_text(table);
    throw PreconditionError("unknown report format '" + format + "'");
}

}  // namespace plaudit
