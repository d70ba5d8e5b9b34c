// Command-line front end: interprets ballot files, tabulates, allocates
// seats, generates assertion sets, and runs or sizes ballot-polling audits.
//
// Exit codes: 0 success (audit certified), 2 full count required (an audit
// that did not certify, or a tie that no audit can certify), 1 any error.

#include <plaudit/plaudit.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace plaudit;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFullCount = 2;

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AuditError("cannot write to '" + path + "'");
    out << content;
}

/// Pads columns so every row lines up; rows and header share widths.
std::string align_table(const std::vector<std::string>& headers,
                        const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        width[c] = headers[c].size();
        for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
    }
    std::string out;
    auto emit = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            out += r[c];
            if (c + 1 < r.size()) out += std::string(width[c] - r[c].size() + 2, ' ');
        }
        out += '\n';
    };
    emit(headers);
    for (const auto& r : rows) emit(r);
    return out;
}

std::string csv_table(const std::vector<std::string>& headers,
                      const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (std::size_t c = 0; c < headers.size(); ++c)
        out += (c ? "," : "") + csv_escape(headers[c]);
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + csv_escape(r[c]);
        out += '\n';
    }
    return out;
}

std::string render_table(const std::string& format, const std::vector<std::string>& headers,
                         const std::vector<std::vector<std::string>>& rows) {
    return format == "csv" ? csv_table(headers, rows) : align_table(headers, rows);
}

int cmd_interpret(const std::string& profile_path, const std::string& out_path) {
    ElectionProfile profile = load_profile(profile_path);
    if (profile.raw_ballots.empty())
        throw ValidationError("profile carries no raw ballot markings to interpret");
    std::string out;
    for (const auto& b : profile.ballots) out += interpreted_ballot_to_json(b).dump() + "\n";
    write_output(out_path, out);
    std::cerr << "interpreted " << profile.interpretation.total << " ballots: "
              << profile.interpretation.valid << " valid, " << profile.interpretation.invalid
              << " spoiled";
    for (const auto& [reason, count] : profile.interpretation.reasons)
        std::cerr << ", " << to_string(reason) << "=" << count;
    std::cerr << "\n";
    return kExitOk;
}

int cmd_tabulate(const std::string& profile_path, const std::string& format,
                 const std::string& out_path) {
    ElectionProfile profile = load_profile(profile_path);
    std::vector<std::vector<std::string>> rows;
    for (const auto& [party, votes] : profile.tallies.per_party)
        rows.push_back({"party", party, std::to_string(votes)});
    for (const auto& [cand, votes] : profile.tallies.per_candidate)
        rows.push_back({"candidate", cand, std::to_string(votes)});
    rows.push_back({"total_votes", "", std::to_string(profile.tallies.total_votes)});
    rows.push_back({"valid_ballots", "", std::to_string(profile.tallies.valid_ballots)});
    rows.push_back({"invalid_ballots", "", std::to_string(profile.tallies.invalid_ballots)});
    write_output(out_path, render_table(format, {"kind", "id", "votes"}, rows));
    return kExitOk;
}

int cmd_allocate(const std::string& profile_path, const std::string& format,
                 const std::string& out_path) {
    ElectionProfile profile = load_profile(profile_path);
    const ContestSpec& spec = profile.contest;
    std::string rendered;
    if (spec.scf_kind == ScfKind::hamilton_free_list) {
        auto alloc = hamilton_allocate(profile.tallies, spec.seats);
        std::vector<std::vector<std::string>> rows;
        for (const auto& [party, fs] : alloc.floor_seats) {
            rows.push_back({party, std::to_string(fs), alloc.remainders.at(party).str(),
                            alloc.remainder_winners.count(party) ? "yes" : "no",
                            std::to_string(alloc.final_seats.at(party))});
        }
        rendered = render_table(format, {"party", "floor", "remainder", "rounded_up", "seats"},
                                rows);
    } else if (spec.scf_kind == ScfKind::highest_averages) {
        auto alloc = highest_averages_allocate(profile.tallies, spec.seats, spec.divisors);
        std::vector<std::vector<std::string>> rows;
        for (const auto& [party, seats] : alloc.seats) {
            auto w = alloc.winner_index.at(party);
            auto l = alloc.loser_index.at(party);
            rows.push_back({party, std::to_string(seats), w ? std::to_string(*w) : "-",
                            l ? std::to_string(*l) : "-"});
        }
        rendered = render_table(format, {"party", "seats", "last_won", "first_lost"}, rows);
    } else {
        std::string winner = plurality_winner(profile.tallies);
        if (spec.scf_kind == ScfKind::supermajority &&
            !supermajority_met(profile.tallies, winner, *spec.threshold))
            throw ValidationError("no candidate clears the supermajority threshold");
        rendered = render_table(format, {"winner"}, {{winner}});
    }
    write_output(out_path, rendered);
    return kExitOk;
}

int cmd_assertions(const std::string& profile_path, const std::string& mode, bool prune,
                   const std::string& out_path) {
    ElectionProfile profile = load_profile(profile_path);
    AssertionSet set = generate_assertions(profile, assertion_mode_from_string(mode), prune);
    write_output(out_path, assertion_set_to_json(set).dump(2) + "\n");
    return kExitOk;
}

int cmd_margins(const std::string& profile_path, const std::string& mode,
                const std::string& format, const std::string& out_path) {
    ElectionProfile profile = load_profile(profile_path);
    AssertionSet set = generate_assertions(profile, assertion_mode_from_string(mode));
    auto margins = compute_margins(profile, set);
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : margins) {
        rows.push_back({m.label, to_string(m.kind), m.mean.str(), m.margin.str(),
                        m.upper_bound.str(), m.aggregate ? m.aggregate->str() : "-",
                        m.aggregate ? (m.aggregate_matches ? "yes" : "no") : "-"});
        if (m.aggregate && !m.aggregate_matches)
            std::cerr << "warning: closed-form mean " << m.aggregate->str()
                      << " differs from the per-ballot mean " << m.mean.str() << " for "
                      << m.label << " (multi-vote ballots)\n";
    }
    write_output(out_path,
                 render_table(format,
                              {"assertion", "kind", "mean", "margin", "upper_bound",
                               "aggregate_mean", "aggregate_matches"},
                              rows));
    return kExitOk;
}

int cmd_asn(const std::string& profile_path, const std::string& mode,
            std::vector<double> risks, const std::string& method_name, long long reps,
            std::uint64_t seed, int threads, double g_shift, const std::string& format,
            const std::string& out_path) {
    ElectionProfile profile = load_profile(profile_path);
    AssertionSet set = generate_assertions(profile, assertion_mode_from_string(mode));
    if (set.assertions.empty()) throw ValidationError("no assertions generated");
    AsnMethod method = method_name == "sim" ? AsnMethod::simulate : AsnMethod::deterministic;
    auto rows = estimate_asns(profile, set, risks, method, reps, seed, threads, g_shift);

    std::vector<std::string> headers{"assertion", "mean", "margin", "risk", "asn"};
    if (method == AsnMethod::simulate) {
        headers.insert(headers.end(), {"reps", "never_stopped", "q10", "q25", "q50", "q75",
                                       "q90"});
    }
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : rows) {
        for (std::size_t r = 0; r < risks.size(); ++r) {
            const AsnEstimate& est = row.estimates[r];
            std::vector<std::string> line{row.label, row.mean.str(), row.margin.str(),
                                          format_double(risks[r]), format_double(est.value)};
            if (method == AsnMethod::simulate) {
                line.push_back(std::to_string(est.reps));
                line.push_back(std::to_string(est.never_stopped));
                for (double q : est.quantiles) line.push_back(format_double(q));
            }
            cells.push_back(std::move(line));
        }
    }
    write_output(out_path, render_table(format, headers, cells));
    return kExitOk;
}

int cmd_audit(const std::string& profile_path, const std::string& mode, double risk,
              std::uint64_t seed, long long round_size, long long max_rounds, double g_shift,
              const std::string& format, const std::string& out_path) {
    ElectionProfile profile = load_profile(profile_path);
    AssertionSet set = generate_assertions(profile, assertion_mode_from_string(mode));
    if (set.assertions.empty()) throw ValidationError("no assertions generated");
    EntityIndex idx(profile.contest);
    std::vector<Assorter> assorters = compile_assorters(profile, set);
    RiskParams params;
    params.risk_limit = risk;
    params.g_shift = g_shift;
    params.population_size = static_cast<long long>(profile.ballots.size());
    AuditResult result =
        run_audit(profile.ballots, assorters, idx, params, seed, round_size, max_rounds);

    std::string out;
    if (format == "csv") {
        std::string header = "round,drawn";
        for (const auto& st : result.assertions) header += "," + csv_escape(st.label);
        out += header + "\n";
        for (const auto& round : result.rounds) {
            std::string drawn;
            for (const auto& id : round.drawn_ids) drawn += (drawn.empty() ? "" : " ") + id;
            out += std::to_string(round.round) + "," + csv_escape(drawn);
            for (double p : round.p_values) out += "," + format_double(p);
            out += "\n";
        }
        out += "\noutcome,ballots_examined,seed\n";
        out += std::string(to_string(result.outcome)) + "," +
               std::to_string(result.ballots_examined) + "," + std::to_string(result.seed) +
               "\n";
    } else {
        for (const auto& round : result.rounds) {
            out += "round " + std::to_string(round.round) + ": drew";
            for (const auto& id : round.drawn_ids) out += " " + id;
            out += "\n";
            for (std::size_t k = 0; k < result.assertions.size(); ++k)
                out += "  p[" + result.assertions[k].label +
                       "] = " + format_double(round.p_values[k]) + "\n";
        }
        out += "outcome: " + std::string(to_string(result.outcome)) + " after " +
               std::to_string(result.ballots_examined) + " ballots\n";
        for (const auto& st : result.assertions) {
            out += "  " + st.label + ": p = " + format_double(st.p_value);
            out += st.certified
                       ? " (certified after " + std::to_string(st.certified_after) + ")"
                       : " (not certified)";
            out += "\n";
        }
    }
    write_output(out_path, out);
    return result.outcome == AuditOutcome::certified ? kExitOk : kExitFullCount;
}

int cmd_report(const std::vector<std::string>& profile_paths, std::vector<double> risks,
               const std::string& method_name, long long reps, std::uint64_t seed, int threads,
               const std::string& format, const std::string& out_path) {
    AsnMethod method = method_name == "sim" ? AsnMethod::simulate : AsnMethod::deterministic;
    ReportTable table;
    table.risk_limits = risks;
    for (const auto& path : profile_paths) {
        ElectionProfile profile = load_profile(path);
        for (AssertionMode mode : report_modes(profile.contest.scf_kind))
            table.rows.push_back(
                build_report_row(profile, mode, risks, method, reps, seed, threads));
    }
    write_output(out_path, render_report(table, format));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"assertion-based risk-limiting audits for party-list elections"};
    app.require_subcommand(1);

    std::string profile_path;
    std::string out_path;
    std::string format = "text";
    std::string mode = "all";
    std::vector<double> risks;
    std::string method = "det";
    long long reps = 200;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    double g_shift = 0.1;
    double risk_single = 0.05;
    long long round_size = 1;
    long long max_rounds = 0;
    bool prune = false;
    std::vector<std::string> profile_paths;

    auto add_profile = [&](CLI::App* cmd) {
        cmd->add_option("--profile", profile_path, "profile file")->required();
    };
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"text", "csv"}));
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "write output to a file instead of stdout");
    };
    auto add_mode = [&](CLI::App* cmd) {
        cmd->add_option("--mode", mode,
                        "assertion family: all-seats, abr, dhondt, within-party, pairwise, "
                        "supermajority, all");
    };

    CLI::App* interpret_cmd = app.add_subcommand("interpret", "interpret raw ballot markings");
    add_profile(interpret_cmd);
    add_out(interpret_cmd);

    CLI::App* tabulate_cmd = app.add_subcommand("tabulate", "tally the profile's ballots");
    add_profile(tabulate_cmd);
    add_format(tabulate_cmd);
    add_out(tabulate_cmd);

    CLI::App* allocate_cmd = app.add_subcommand("allocate", "compute the seat allocation");
    add_profile(allocate_cmd);
    add_format(allocate_cmd);
    add_out(allocate_cmd);

    CLI::App* assertions_cmd =
        app.add_subcommand("assertions", "generate the assertion set for the reported outcome");
    add_profile(assertions_cmd);
    add_mode(assertions_cmd);
    assertions_cmd->add_flag("--prune", prune, "drop assertions that hold vacuously");
    add_out(assertions_cmd);

    CLI::App* margins_cmd =
        app.add_subcommand("margins", "assorter means and margins for the assertion set");
    add_profile(margins_cmd);
    add_mode(margins_cmd);
    add_format(margins_cmd);
    add_out(margins_cmd);

    CLI::App* asn_cmd = app.add_subcommand("asn", "estimate audit sample sizes");
    add_profile(asn_cmd);
    add_mode(asn_cmd);
    asn_cmd->add_option("--risk", risks, "risk limit (repeatable)")->required();
    asn_cmd->add_option("--method", method, "sim or det")
        ->required()
        ->check(CLI::IsMember({"sim", "det"}));
    asn_cmd->add_option("--reps", reps, "simulation replications");
    asn_cmd->add_option("--seed", seed, "PRNG seed")->each([&](const std::string&) {
        seed_given = true;
    });
    asn_cmd->add_option("--threads", threads, "worker threads for simulation");
    asn_cmd->add_option("--g", g_shift, "Kaplan-Kolmogorov shrinkage");
    add_format(asn_cmd);
    add_out(asn_cmd);

    CLI::App* audit_cmd = app.add_subcommand("audit", "run a ballot-polling audit");
    add_profile(audit_cmd);
    add_mode(audit_cmd);
    audit_cmd->add_option("--risk", risk_single, "risk limit")->required();
    audit_cmd->add_option("--seed", seed, "PRNG seed")->required();
    audit_cmd->add_option("--round-size", round_size, "ballots drawn per round");
    audit_cmd->add_option("--max-rounds", max_rounds, "stop after this many rounds (0 = none)");
    audit_cmd->add_option("--g", g_shift, "Kaplan-Kolmogorov shrinkage");
    add_format(audit_cmd);
    add_out(audit_cmd);

    CLI::App* report_cmd =
        app.add_subcommand("report", "cross-contest summary of audit sample sizes");
    report_cmd->add_option("--profile", profile_paths, "profile file (repeatable)")->required();
    report_cmd->add_option("--risk", risks, "risk limit (repeatable)");
    report_cmd->add_option("--method", method, "sim or det")
        ->check(CLI::IsMember({"sim", "det"}));
    report_cmd->add_option("--reps", reps, "simulation replications");
    report_cmd->add_option("--seed", seed, "PRNG seed");
    report_cmd->add_option("--threads", threads, "worker threads for simulation");
    add_format(report_cmd);
    add_out(report_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(interpret_cmd)) return cmd_interpret(profile_path, out_path);
        if (app.got_subcommand(tabulate_cmd))
            return cmd_tabulate(profile_path, format, out_path);
        if (app.got_subcommand(allocate_cmd))
            return cmd_allocate(profile_path, format, out_path);
        if (app.got_subcommand(assertions_cmd))
            return cmd_assertions(profile_path, mode, prune, out_path);
        if (app.got_subcommand(margins_cmd))
            return cmd_margins(profile_path, mode, format, out_path);
        if (app.got_subcommand(asn_cmd)) {
            if (method == "sim" && !seed_given)
                throw PreconditionError("simulation needs an explicit --seed");
            return cmd_asn(profile_path, mode, risks, method, reps, seed, threads, g_shift,
                           format, out_path);
        }
        if (app.got_subcommand(audit_cmd))
            return cmd_audit(profile_path, mode, risk_single, seed, round_size, max_rounds,
                             g_shift, format, out_path);
        if (app.got_subcommand(report_cmd)) {
            if (risks.empty()) risks = {0.05, 0.10};
            return cmd_report(profile_paths, risks, method, reps, seed, threads, format,
                              out_path);
        }
    } catch (const TieError& e) {
        std::cerr << "full count required: " << e.what() << "\n";
        return kExitFullCount;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
