#include "qnar/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qnar/errors.hpp"

namespace qnar {

namespace {

using nlohmann::json;

json parse_line(const std::string& line, int lineno) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        fail(errc::parse_error, "line " + std::to_string(lineno) + ": expected a JSON object");
    return j;
}

std::string require_string(const json& j, const char* field, int lineno) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
        fail(errc::parse_error,
             "line " + std::to_string(lineno) + ": missing string field \"" + field + "\"");
    return it->get<std::string>();
}

TokenAmount amount_field(const json& j, const char* field, int lineno) {
    auto it = j.find(field);
    if (it == j.end())
        fail(errc::parse_error,
             "line " + std::to_string(lineno) + ": missing field \"" + field + "\"");
    if (it->is_string()) return TokenAmount::parse(it->get<std::string>());
    if (it->is_number_integer()) return TokenAmount::from_tokens(it->get<std::int64_t>());
    if (it->is_number_float()) return TokenAmount::from_tokens(it->get<double>());
    fail(errc::parse_error, "line " + std::to_string(lineno) + ": \"" + field +
                                "\" must be a decimal string or number");
}

template <std::size_t N>
std::array<std::uint8_t, N> hex_field(const json& j, const char* field, int lineno) {
    std::vector<std::uint8_t> bytes = from_hex(require_string(j, field, lineno));
    if (bytes.size() != N)
        fail(errc::parse_error, "line " + std::to_string(lineno) + ": \"" + field + "\" must be " +
                                    std::to_string(N) + " bytes of hex");
    std::array<std::uint8_t, N> out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return out;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::vector<ContributionEvent> parse_events_jsonl(std::istream& in) {
    std::vector<ContributionEvent> events;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = parse_line(line, lineno);
        ContributionEvent ev;
        std::string kind = require_string(j, "kind", lineno);
        auto parsed = event_kind_from_string(kind);
        if (!parsed)
            fail(errc::parse_error,
                 "line " + std::to_string(lineno) + ": unknown event kind \"" + kind + "\"");
        ev.kind = *parsed;
        ev.actor = require_string(j, "actor", lineno);
        ev.target = require_string(j, "target", lineno);
        auto ts = j.find("ts");
        if (ts == j.end() || !ts->is_number_integer())
            fail(errc::parse_error, "line " + std::to_string(lineno) + ": missing integer ts");
        ev.ts = ts->get<std::int64_t>();
        events.push_back(std::move(ev));
    }
    return events;
}

std::vector<ContributionEvent> read_events_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open events file: " + path.string());
    return parse_events_jsonl(in);
}

std::vector<AuctionAction> parse_auction_journal(std::istream& in) {
    std::vector<AuctionAction> actions;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = parse_line(line, lineno);
        std::string op = require_string(j, "op", lineno);
        AuctionAction action;
        if (op == "propose") {
            action.op = AuctionAction::Op::Propose;
            action.actor = require_string(j, "actor", lineno);
            action.amount = amount_field(j, "amount", lineno);
        } else if (op == "commit") {
            action.op = AuctionAction::Op::Commit;
            action.actor = require_string(j, "actor", lineno);
            action.digest = hex_field<32>(j, "digest", lineno);
        } else if (op == "close") {
            action.op = AuctionAction::Op::CloseCommits;
        } else if (op == "reveal") {
            action.op = AuctionAction::Op::Reveal;
            action.actor = require_string(j, "actor", lineno);
            action.amount = amount_field(j, "amount", lineno);
            std::string vote = require_string(j, "vote", lineno);
            if (vote == "accept")
                action.vote = Vote::Accept;
            else if (vote == "deny")
                action.vote = Vote::Deny;
            else
                fail(errc::parse_error,
                     "line " + std::to_string(lineno) + ": vote must be accept or deny");
            action.nonce = hex_field<32>(j, "nonce", lineno);
        } else if (op == "settle") {
            action.op = AuctionAction::Op::Settle;
        } else {
            fail(errc::parse_error,
                 "line " + std::to_string(lineno) + ": unknown op \"" + op + "\"");
        }
        actions.push_back(std::move(action));
    }
    return actions;
}

std::vector<AuctionAction> read_auction_journal(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open journal file: " + path.string());
    return parse_auction_journal(in);
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::io_error, "cannot create " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(errc::io_error, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        fail(errc::io_error, "cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

std::string format_csv_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string scores_csv(const CredRankResult& result) {
    std::string out = "period,node,s_star,s_normalized\n";
    for (const EpochScores& epoch : result.epochs) {
        for (std::size_t i = 0; i < epoch.users.size(); ++i) {
            out += std::to_string(epoch.period);
            out += ',';
            out += csv_escape(epoch.users[i]);
            out += ',';
            out += format_csv_double(epoch.s_star[i]);
            out += ',';
            out += format_csv_double(epoch.scores[i]);
            out += '\n';
        }
    }
    return out;
}

std::string simulation_csv(std::span<const SimulationResult> results) {
    std::string out = "n,rounds,dist,exp_return,std,sharpe,survivors\n";
    for (const SimulationResult& result : results) {
        std::string prefix = std::to_string(result.config.stakers);
        prefix += ',';
        prefix += std::to_string(result.config.rounds);
        prefix += ',';
        prefix += to_string(result.config.wealth.kind);
        prefix += ',';
        for (const ReplicationResult& rep : result.replications) {
            out += prefix;
            if (rep.returns.count() >= 1) out += format_csv_double(rep.returns.mean());
            out += ',';
            if (rep.returns.count() >= 2) out += format_csv_double(rep.returns.stddev());
            out += ',';
            if (rep.returns.count() >= 2 && rep.returns.variance() > 0.0)
                out += format_csv_double(sharpe_ratio(rep.returns));
            out += ',';
            out += std::to_string(rep.survivors);
            out += '\n';
        }
    }
    return out;
}

std::string wealth_paths_csv(std::span<const SimulationResult> results) {
    std::string out = "n,rounds,dist,replication,round,staker,wealth_subunits\n";
    for (const SimulationResult& result : results) {
        const auto n = static_cast<std::size_t>(result.config.stakers);
        std::string prefix = std::to_string(result.config.stakers);
        prefix += ',';
        prefix += std::to_string(result.config.rounds);
        prefix += ',';
        prefix += to_string(result.config.wealth.kind);
        prefix += ',';
        for (const ReplicationResult& rep : result.replications) {
            for (std::size_t pos = 0; pos < rep.wealth_path.size(); ++pos) {
                out += prefix;
                out += std::to_string(rep.index);
                out += ',';
                out += std::to_string(pos / n + 1);
                out += ',';
                out += std::to_string(pos % n);
                out += ',';
                out += std::to_string(rep.wealth_path[pos]);
                out += '\n';
            }
        }
    }
    return out;
}

std::string payouts_csv(const PayoutRun& run) {
    std::string out = "user,amount\n";
    for (const Payment& p : run.payments) {
        out += csv_escape(p.user);
        out += ',';
        out += p.amount.to_string();
        out += '\n';
    }
    return out;
}

std::string settlement_csv(const Settlement& settlement) {
    std::string out = "staker,stake,vote,revealed,forfeited,returned,inflation\n";
    for (const Receipt& r : settlement.receipts) {
        out += csv_escape(r.staker);
        out += ',';
        out += r.stake.to_string();
        out += ',';
        out += to_string(r.vote);
        out += ',';
        out += r.revealed ? "1" : "0";
        out += ',';
        out += r.forfeited ? "1" : "0";
        out += ',';
        out += r.returned.to_string();
        out += ',';
        out += r.inflation.to_string();
        out += '\n';
    }
    return out;
}

} // namespace qnar
