#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vivt/check.hpp"
#include "vivt/coherence.hpp"
#include "vivt/stats.hpp"
#include "vivt/trace.hpp"

namespace vivt {

/// `key = value` lines; sizes accept K/KB/M/MB suffixes. Unset keys keep their defaults.
[[nodiscard]] SystemConfig parse_config(std::string_view text);
[[nodiscard]] std::string format_config(const SystemConfig& config);

/// Raised in check mode at the first event after which an invariant or the oracle fails.
class CheckFailure : public std::runtime_error {
public:
    CheckFailure(std::size_t event_index, std::vector<Violation> violations, std::string detail);
    [[nodiscard]] std::size_t event_index() const { return event_index_; }
    [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }

private:
    std::size_t event_index_;
    std::vector<Violation> violations_;
};

struct RunOptions {
    bool check_mode = false;
    bool check_data = true;  // include stale-data check (c) in per-event checks
};

struct RunOutcome {
    SimStats stats;
    std::vector<Violation> violations;  // from the final check at quiescence
    PhysicalMemory final_memory{64};

    [[nodiscard]] bool ok() const { return violations.empty() && stats.oracle_mismatches == 0; }
};

/// Replays a trace on a fresh system, comparing every read against the flat-memory
/// oracle. In check mode, invariants and the oracle are checked after every event and
/// the first failure throws CheckFailure; otherwise invariants are checked once at the
/// end, after all invalidate queues are drained.
[[nodiscard]] RunOutcome run_trace(const std::vector<TraceEvent>& events, const SystemConfig& config,
                                   const PageTable& page_table, const RunOptions& options = {});

struct GenParams {
    std::uint64_t seed = 1;
    unsigned cores = 1;
    std::size_t events = 1000;
    unsigned synonym_groups = 4;
    double write_ratio = 0.3;
    double context_switch_ratio = 0.001;
    unsigned contexts = 2;
    unsigned private_pages = 8;   // per context
    unsigned lines_per_page = 8;  // hot lines touched in each page
};

struct TraceBundle {
    std::vector<TraceEvent> events;
    PageTable page_table;
};

/// Deterministic in the seed. Each synonym group maps several virtual pages, differing
/// in the synonym index bits where the geometry has any, onto one shared physical page.
[[nodiscard]] TraceBundle generate_trace(const GenParams& params, const Geometry& geometry);

[[nodiscard]] std::string stats_csv(const SimStats& stats);
[[nodiscard]] SimStats parse_stats_csv(std::string_view csv);
[[nodiscard]] std::string stats_text(const SimStats& stats);

}  // namespace vivt
