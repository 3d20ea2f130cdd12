#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "vivt/addr.hpp"
#include "vivt/cache.hpp"
#include "vivt/memory.hpp"
#include "vivt/mmu.hpp"
#include "vivt/rlut.hpp"
#include "vivt/stats.hpp"

namespace vivt {

struct SystemConfig {
    CacheConfig cache;
    unsigned cores = 1;
    Latencies latencies;

    friend bool operator==(const SystemConfig& a, const SystemConfig& b) {
        return a.cache == b.cache && a.cores == b.cores && a.latencies.translate == b.latencies.translate &&
               a.latencies.fetch == b.latencies.fetch;
    }
};

enum class ControllerMode { Ready, MissPendingAwaitInvalidate, MissPendingAwaitLine };

// External invalidations wait in `pending` and are sampled only in Ready.
struct ControllerState {
    ControllerMode mode = ControllerMode::Ready;
    std::deque<Addr> pending;  // physical line addresses, FIFO
};

struct Core {
    explicit Core(const Geometry& g) : cache(g), rlut(g) {}

    CacheState cache;
    Rlut rlut;
    ControllerState controller;
    ContextId context = 0;
    CoreStats stats;
};

struct MemoryAccess {
    Access rw = Access::Read;
    ContextId ctx = 0;
    Addr vaddr = 0;
    std::uint32_t data = 0;
};

struct StepResponse {
    bool hit = false;
    bool faulted = false;
    std::optional<std::uint32_t> rdata;  // set for completed reads
    std::uint64_t cycles = 0;            // access cycles, excluding snoop drains
};

/// Observable controller actions, recorded when logging is enabled.
struct ControllerLogEntry {
    enum class Kind { InvalidateQueued, SnoopApplied, MissStarted, LineFilled, Hit, Flush };
    Kind kind;
    std::size_t core;
    Addr addr;

    friend bool operator==(const ControllerLogEntry&, const ControllerLogEntry&) = default;
};

// Write-through, invalidate-on-write multi-core memory subsystem. Each core owns a
// VIVT cache, its RLUT and a cache controller; all cores share one physical memory
// and one page table. Every operation runs to completion before the next starts.
class MemorySystem {
public:
    MemorySystem(const SystemConfig& config, PageTable page_table);

    /// Cache controller: drains queued invalidations (Ready), serves the access,
    /// and after a miss re-enters Ready and drains whatever arrived meanwhile.
    /// Translation faults are reported in the response, not thrown.
    StepResponse controller_step(std::size_t core, const MemoryAccess& access, const MissObserver& observer = {});

    /// Flushes the cache and clears the RLUT; the core then runs in `ctx`.
    void context_switch(std::size_t core, ContextId ctx);

    /// RLUT-directed invalidation of p's resident lines. Requires Ready.
    /// Returns the number of valid lines actually cleared.
    unsigned apply_snoop_invalidate(Addr p, std::size_t core);

    /// Memory-controller write: updates memory and queues an invalidate at every other core.
    void coherent_write(std::size_t source_core, Addr p, std::uint32_t wdata);

    /// Snoop invalidate from outside the cores: queued at every core.
    void external_invalidate(Addr p);

    void drain(std::size_t core);
    void drain_all();

    [[nodiscard]] std::size_t core_count() const { return cores_.size(); }
    [[nodiscard]] const Core& core(std::size_t i) const { return cores_.at(i); }
    [[nodiscard]] Core& core(std::size_t i) { return cores_.at(i); }
    [[nodiscard]] const PhysicalMemory& memory() const { return memory_; }
    [[nodiscard]] const PageTable& page_table() const { return page_table_; }
    [[nodiscard]] const Geometry& geometry() const { return geom_; }
    [[nodiscard]] const SystemConfig& config() const { return config_; }
    [[nodiscard]] std::uint64_t max_queue_depth() const { return max_queue_depth_; }

    void enable_log(bool on) { logging_ = on; }
    [[nodiscard]] const std::vector<ControllerLogEntry>& log() const { return log_; }

    [[nodiscard]] SimStats stats() const;

private:
    class CorePort;

    void enqueue(std::size_t core, Addr p);
    void record(ControllerLogEntry::Kind kind, std::size_t core, Addr addr);
    void write_hit_synonyms(std::size_t core, Addr v, Addr p);

    SystemConfig config_;
    Geometry geom_;
    PageTable page_table_;
    PhysicalMemory memory_;
    std::vector<Core> cores_;
    std::uint64_t max_queue_depth_ = 0;
    bool logging_ = false;
    std::vector<ControllerLogEntry> log_;
};

}  // namespace vivt
