#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "qnar/auction.hpp"
#include "qnar/credrank.hpp"
#include "qnar/graph.hpp"
#include "qnar/simulation.hpp"

namespace qnar {

// Flat key-value settings with a fixed vocabulary: every known key is
// registered with its default, and setting anything else raises UnknownKey.
// Later sources win, so callers layer file, environment, and flag values in
// that order on top of the defaults.
class Config {
public:
    static Config defaults();

    // Reads "key = value" lines; blank lines and lines starting with # are
    // skipped.
    void apply_file(const std::filesystem::path& path);
    // Applies QNAR_* entries from an environment block: the prefix is
    // stripped, the rest is lowercased, and underscores match either the
    // dots or the underscores of a registered key, so QNAR_EDGE_USER_REVIEW
    // sets edge.user.review and QNAR_SIM_UNIFORM_LO sets sim.uniform_lo.
    void apply_env(const char* const* envp);

    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;
    bool is_auto(const std::string& key) const { return get(key) == "auto"; }

    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

WeightConfig weights_from(const Config& config);
PageRankOptions pagerank_options_from(const Config& config);
CredRankOptions credrank_options_from(const Config& config);
EpochBuildOptions epoch_build_options_from(const Config& config);
// Resolves epoch.origin and epoch.count set to "auto" from the event span:
// the origin snaps to the earliest event and the count covers the latest.
EpochConfig epoch_config_from(const Config& config, std::span<const ContributionEvent> events);
// sim.n, sim.rounds, and sim.dist accept comma-separated lists; the grid is
// their cross product in that nesting order, each cell sharing the remaining
// sim.* settings.
std::vector<SimulationConfig> simulation_grid_from(const Config& config);
// Convenience for single-cell configs; rejects a multi-cell grid.
SimulationConfig simulation_config_from(const Config& config);
AuctionConfig auction_config_from(const Config& config);

} // namespace qnar
