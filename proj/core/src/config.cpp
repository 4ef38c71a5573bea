#include "qnar/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "qnar/errors.hpp"

namespace qnar {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

Config Config::defaults() {
    Config c;
    auto& v = c.values_;
    for (const auto& [key, weight] : WeightConfig::defaults().flat_entries())
        v[key] = format_double(weight);

    v["pagerank.alpha"] = "0.15";
    v["pagerank.tol"] = "1e-10";
    v["pagerank.max_iter"] = "10000";

    v["credrank.decay"] = "1";
    v["credrank.base"] = "1000";

    v["epoch.origin"] = "auto";
    v["epoch.period"] = "604800";
    v["epoch.count"] = "auto";
    v["epoch.webbing"] = "false";

    v["sim.n"] = "100";
    v["sim.rounds"] = "1000";
    v["sim.reps"] = "100";
    v["sim.seed"] = "0";
    v["sim.dist"] = "uniform";
    v["sim.uniform_lo"] = "0.5";
    v["sim.uniform_hi"] = "1.5";
    v["sim.pareto_shape"] = "2";
    v["sim.pareto_scale"] = "0.5";
    v["sim.f"] = "0.1";
    v["sim.p"] = "0.5";
    v["sim.inflation"] = "1";
    v["sim.inflation_mode"] = "per-participant";
    v["sim.outcome"] = "endogenous";
    v["sim.checkpoints"] = "";
    v["sim.wealth_paths"] = "false";
    v["sim.threads"] = "1";

    v["payout.strategy"] = "balanced";
    v["payout.budget"] = "0";
    v["payout.decay"] = "0.5";

    v["auction.min_deposit"] = "1";
    v["auction.inflation"] = "0";
    v["auction.inflation_mode"] = "per-participant";
    v["auction.deposit_sink"] = "burn";
    return c;
}

void Config::apply_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open config file: " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            fail(errc::parse_error,
                 path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
}

void Config::apply_env(const char* const* envp) {
    constexpr std::string_view prefix = "QNAR_";
    auto canon = [](std::string_view s) {
        std::string out;
        out.reserve(s.size());
        for (char ch : s)
            out.push_back(ch == '_' ? '.' : static_cast<char>(std::tolower(ch)));
        return out;
    };
    for (const char* const* e = envp; e && *e; ++e) {
        std::string_view entry(*e);
        if (!entry.starts_with(prefix)) continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string_view::npos) continue;
        std::string key = canon(entry.substr(prefix.size(), eq - prefix.size()));
        // Key names can contain underscores themselves (sim.uniform_lo), so
        // an unmatched dotted form is resolved against the vocabulary with
        // '.' and '_' treated alike.
        if (!values_.contains(key)) {
            for (const auto& [known, value] : values_) {
                if (canon(known) == key) {
                    key = known;
                    break;
                }
            }
        }
        set(key, std::string(entry.substr(eq + 1)));
    }
}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) fail(errc::unknown_key, "unknown setting: " + key);
    it->second = value;
}

const std::string& Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(errc::unknown_key, "unknown setting: " + key);
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string& raw = get(key);
    char* end = nullptr;
    double v = std::strtod(raw.c_str(), &end);
    if (raw.empty() || end != raw.c_str() + raw.size())
        fail(errc::parse_error, key + " is not a number: " + raw);
    return v;
}

std::int64_t Config::get_int(const std::string& key) const {
    const std::string& raw = get(key);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc{} || ptr != raw.data() + raw.size())
        fail(errc::parse_error, key + " is not an integer: " + raw);
    return v;
}

std::uint64_t Config::get_uint(const std::string& key) const {
    const std::string& raw = get(key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc{} || ptr != raw.data() + raw.size())
        fail(errc::parse_error, key + " is not an unsigned integer: " + raw);
    return v;
}

bool Config::get_bool(const std::string& key) const {
    const std::string& raw = get(key);
    if (raw == "true" || raw == "1" || raw == "on") return true;
    if (raw == "false" || raw == "0" || raw == "off") return false;
    fail(errc::parse_error, key + " is not a boolean: " + raw);
}

WeightConfig weights_from(const Config& config) {
    WeightConfig weights = WeightConfig::defaults();
    for (const auto& [key, raw] : config.entries()) {
        if (key.starts_with("edge.")) {
            std::string rest = key.substr(5);
            std::size_t dot = rest.find('.');
            auto src = node_kind_from_string(rest.substr(0, dot));
            auto dst = node_kind_from_string(rest.substr(dot + 1));
            if (!src || !dst) fail(errc::unknown_key, "unknown edge kinds in " + key);
            weights.set_edge_weight(*src, *dst, config.get_double(key));
        } else if (key.starts_with("mint.")) {
            auto kind = node_kind_from_string(key.substr(5));
            if (!kind) fail(errc::unknown_key, "unknown node kind in " + key);
            weights.set_mint_weight(*kind, config.get_double(key));
        }
    }
    return weights;
}

PageRankOptions pagerank_options_from(const Config& config) {
    PageRankOptions opts;
    opts.alpha = config.get_double("pagerank.alpha");
    opts.tol = config.get_double("pagerank.tol");
    opts.max_iter = static_cast<int>(config.get_int("pagerank.max_iter"));
    return opts;
}

CredRankOptions credrank_options_from(const Config& config) {
    CredRankOptions opts;
    opts.decay = config.get_double("credrank.decay");
    opts.base_mint = config.get_double("credrank.base");
    opts.pagerank = pagerank_options_from(config);
    return opts;
}

EpochBuildOptions epoch_build_options_from(const Config& config) {
    return EpochBuildOptions{config.get_bool("epoch.webbing")};
}

EpochConfig epoch_config_from(const Config& config, std::span<const ContributionEvent> events) {
    EpochConfig epochs;
    epochs.period_seconds = config.get_int("epoch.period");
    if (epochs.period_seconds <= 0) fail(errc::parse_error, "epoch.period must be positive");

    std::int64_t min_ts = 0, max_ts = 0;
    if (!events.empty()) {
        min_ts = max_ts = events.front().ts;
        for (const ContributionEvent& ev : events) {
            min_ts = std::min(min_ts, ev.ts);
            max_ts = std::max(max_ts, ev.ts);
        }
    }

    epochs.origin = config.is_auto("epoch.origin") ? min_ts : config.get_int("epoch.origin");
    if (config.is_auto("epoch.count")) {
        std::int64_t span = max_ts >= epochs.origin ? max_ts - epochs.origin : 0;
        epochs.count = static_cast<std::int32_t>(span / epochs.period_seconds + 1);
    } else {
        epochs.count = static_cast<std::int32_t>(config.get_int("epoch.count"));
    }
    return epochs;
}

namespace {

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> items;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t comma = raw.find(',', pos);
        if (comma == std::string::npos) comma = raw.size();
        std::string item = trim(raw.substr(pos, comma - pos));
        if (!item.empty()) items.push_back(std::move(item));
        pos = comma + 1;
    }
    return items;
}

std::int64_t parse_int_item(const std::string& key, const std::string& item) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size())
        fail(errc::parse_error, key + " entry is not an integer: " + item);
    return v;
}

} // namespace

std::vector<SimulationConfig> simulation_grid_from(const Config& config) {
    SimulationConfig base;
    base.replications = static_cast<std::int32_t>(config.get_int("sim.reps"));
    base.seed = config.get_uint("sim.seed");
    base.wealth.uniform_lo = config.get_double("sim.uniform_lo");
    base.wealth.uniform_hi = config.get_double("sim.uniform_hi");
    base.wealth.pareto_shape = config.get_double("sim.pareto_shape");
    base.wealth.pareto_scale = config.get_double("sim.pareto_scale");
    base.bid_fraction = config.get_double("sim.f");
    base.vote_probability = config.get_double("sim.p");
    base.inflation = TokenAmount::parse(config.get("sim.inflation"));
    if (config.get("sim.inflation_mode") == "per-participant")
        base.inflation_mode = InflationMode::PerParticipant;
    else if (config.get("sim.inflation_mode") == "total-split")
        base.inflation_mode = InflationMode::TotalSplit;
    else
        fail(errc::parse_error, "sim.inflation_mode must be per-participant or total-split");
    if (auto mode = outcome_mode_from_string(config.get("sim.outcome")))
        base.outcome = *mode;
    else
        fail(errc::parse_error, "sim.outcome must be endogenous or exogenous");
    for (const std::string& item : split_list(config.get("sim.checkpoints")))
        base.checkpoints.push_back(parse_int_item("sim.checkpoints", item));
    base.record_wealth = config.get_bool("sim.wealth_paths");
    base.threads = static_cast<int>(config.get_int("sim.threads"));

    std::vector<std::int64_t> ns, rounds;
    for (const std::string& item : split_list(config.get("sim.n")))
        ns.push_back(parse_int_item("sim.n", item));
    for (const std::string& item : split_list(config.get("sim.rounds")))
        rounds.push_back(parse_int_item("sim.rounds", item));
    std::vector<WealthDistribution> dists;
    for (const std::string& item : split_list(config.get("sim.dist"))) {
        auto dist = wealth_distribution_from_string(item);
        if (!dist) fail(errc::parse_error, "sim.dist must list uniform or pareto");
        dists.push_back(*dist);
    }
    if (ns.empty() || rounds.empty() || dists.empty())
        fail(errc::parse_error, "sim.n, sim.rounds, and sim.dist must be non-empty");

    std::vector<SimulationConfig> grid;
    grid.reserve(ns.size() * rounds.size() * dists.size());
    for (std::int64_t n : ns)
        for (std::int64_t r : rounds)
            for (WealthDistribution dist : dists) {
                SimulationConfig cell = base;
                cell.stakers = static_cast<std::int32_t>(n);
                cell.rounds = r;
                cell.wealth.kind = dist;
                grid.push_back(std::move(cell));
            }
    return grid;
}

SimulationConfig simulation_config_from(const Config& config) {
    std::vector<SimulationConfig> grid = simulation_grid_from(config);
    if (grid.size() != 1)
        fail(errc::parse_error, "expected a single simulation cell, got a grid");
    return grid.front();
}

AuctionConfig auction_config_from(const Config& config) {
    AuctionConfig auction;
    auction.min_deposit = TokenAmount::parse(config.get("auction.min_deposit"));
    auction.inflation = TokenAmount::parse(config.get("auction.inflation"));
    if (config.get("auction.inflation_mode") == "per-participant")
        auction.inflation_mode = InflationMode::PerParticipant;
    else if (config.get("auction.inflation_mode") == "total-split")
        auction.inflation_mode = InflationMode::TotalSplit;
    else
        fail(errc::parse_error, "auction.inflation_mode must be per-participant or total-split");
    if (config.get("auction.deposit_sink") == "burn")
        auction.deposit_sink = DepositSink::Burn;
    else if (config.get("auction.deposit_sink") == "to-winners")
        auction.deposit_sink = DepositSink::ToWinners;
    else
        fail(errc::parse_error, "auction.deposit_sink must be burn or to-winners");
    return auction;
}

} // namespace qnar
