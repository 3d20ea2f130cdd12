#pragma once

#include <cstdint>
#include <vector>

namespace vivt {

/// Where a core's cycles went. Snoop lookups are pipelined: one per cycle.
struct CycleLedger {
    std::uint64_t hit_cycles = 0;
    std::uint64_t miss_cycles = 0;
    std::uint64_t snoop_cycles = 0;
    std::uint64_t rlut_lookups = 0;      // snoop and write-through lookups
    std::uint64_t rlut_inserts = 0;      // one per miss
    std::uint64_t rlut_busy_cycles = 0;  // lookups * 1 + inserts * 2

    friend bool operator==(const CycleLedger&, const CycleLedger&) = default;
};

struct CoreStats {
    std::uint64_t read_hits = 0;
    std::uint64_t read_misses = 0;
    std::uint64_t write_hits = 0;
    std::uint64_t write_misses = 0;
    std::uint64_t synonym_evictions = 0;
    std::uint64_t snoop_invalidations_applied = 0;
    std::uint64_t stale_invalidation_noops = 0;
    std::uint64_t rlut_displacements = 0;
    std::uint64_t flushes = 0;
    std::uint64_t translation_faults = 0;
    std::uint64_t total_cycles = 0;
    CycleLedger ledger;

    [[nodiscard]] std::uint64_t hits() const { return read_hits + write_hits; }
    [[nodiscard]] std::uint64_t misses() const { return read_misses + write_misses; }
    [[nodiscard]] std::uint64_t accesses() const { return hits() + misses(); }
    [[nodiscard]] double hit_ratio() const {
        return accesses() == 0 ? 0.0 : static_cast<double>(hits()) / static_cast<double>(accesses());
    }

    CoreStats& operator+=(const CoreStats& o);
    friend bool operator==(const CoreStats&, const CoreStats&) = default;
};

struct SimStats {
    std::vector<CoreStats> cores;
    std::uint64_t max_invalidate_queue_depth = 0;
    std::uint64_t oracle_mismatches = 0;
    std::uint64_t events = 0;

    [[nodiscard]] CoreStats total() const;
    friend bool operator==(const SimStats&, const SimStats&) = default;
};

}  // namespace vivt
