#include "vivt/coherence.hpp"

#include <stdexcept>

namespace vivt {

class MemorySystem::CorePort final : public MemoryPort {
public:
    CorePort(MemorySystem& sys, std::size_t core) : sys_(sys), core_(core) {}
    void read_line(Addr line_addr, std::span<std::uint8_t> out) const override { sys_.memory_.read_line(line_addr, out); }
    void write_word(Addr p, std::uint32_t word) override { sys_.coherent_write(core_, p, word); }

private:
    MemorySystem& sys_;
    std::size_t core_;
};

MemorySystem::MemorySystem(const SystemConfig& config, PageTable page_table)
    : config_(config),
      geom_(derive_geometry(config.cache)),
      page_table_(std::move(page_table)),
      memory_(config.cache.line_size) {
    if (config.cores == 0) throw ConfigError("cores", "must be at least 1");
    page_table_.validate(geom_);
    cores_.reserve(config.cores);
    for (unsigned i = 0; i < config.cores; ++i) cores_.emplace_back(geom_);
}

void MemorySystem::record(ControllerLogEntry::Kind kind, std::size_t core, Addr addr) {
    if (logging_) log_.push_back({kind, core, addr});
}

void MemorySystem::enqueue(std::size_t core, Addr p) {
    auto& queue = cores_.at(core).controller.pending;
    queue.push_back(line_address(mask_pa(p, geom_), geom_));
    max_queue_depth_ = std::max<std::uint64_t>(max_queue_depth_, queue.size());
    record(ControllerLogEntry::Kind::InvalidateQueued, core, queue.back());
}

void MemorySystem::coherent_write(std::size_t source_core, Addr p, std::uint32_t wdata) {
    memory_.write_word(mask_pa(p, geom_) & ~Addr{3}, wdata);
    for (std::size_t c = 0; c < cores_.size(); ++c) {
        if (c != source_core) enqueue(c, p);
    }
}

void MemorySystem::external_invalidate(Addr p) {
    for (std::size_t c = 0; c < cores_.size(); ++c) enqueue(c, p);
}

unsigned MemorySystem::apply_snoop_invalidate(Addr p, std::size_t core_index) {
    Core& core = cores_.at(core_index);
    if (core.controller.mode != ControllerMode::Ready)
        throw std::logic_error("snoop invalidate applied while a miss is pending");
    unsigned cleared = 0;
    for (const auto& ref : core.rlut.lookup(p)) {
        if (core.cache.invalidate_virtual_line(ref)) {
            ++cleared;
        } else {
            ++core.stats.stale_invalidation_noops;
        }
    }
    core.stats.snoop_invalidations_applied += cleared;
    core.stats.ledger.rlut_lookups += 1;
    core.stats.ledger.rlut_busy_cycles += kRlutLookupCycles;
    core.stats.ledger.snoop_cycles += kRlutLookupCycles;
    core.stats.total_cycles += kRlutLookupCycles;
    record(ControllerLogEntry::Kind::SnoopApplied, core_index, p);
    return cleared;
}

void MemorySystem::drain(std::size_t core_index) {
    auto& queue = cores_.at(core_index).controller.pending;
    while (!queue.empty()) {
        const Addr p = queue.front();
        queue.pop_front();
        apply_snoop_invalidate(p, core_index);
    }
}

void MemorySystem::drain_all() {
    for (std::size_t c = 0; c < cores_.size(); ++c) drain(c);
}

void MemorySystem::context_switch(std::size_t core_index, ContextId ctx) {
    drain(core_index);
    Core& core = cores_.at(core_index);
    core.cache.flush_all();
    core.rlut.clear();
    core.context = ctx;
    ++core.stats.flushes;
    record(ControllerLogEntry::Kind::Flush, core_index, ctx);
}

void MemorySystem::write_hit_synonyms(std::size_t core_index, Addr v, Addr p) {
    Core& core = cores_[core_index];
    const VirtualLineRef own = line_ref(v, geom_);
    for (const auto& ref : core.rlut.lookup(p)) {
        if (ref == own) continue;
        if (core.cache.invalidate_virtual_line(ref)) {
            ++core.stats.synonym_evictions;
        } else {
            ++core.stats.stale_invalidation_noops;
        }
    }
    core.stats.ledger.rlut_lookups += 1;
    core.stats.ledger.rlut_busy_cycles += kRlutLookupCycles;
}

StepResponse MemorySystem::controller_step(std::size_t core_index, const MemoryAccess& access,
                                           const MissObserver& observer) {
    drain(core_index);
    if (cores_.at(core_index).context != access.ctx) context_switch(core_index, access.ctx);

    Core& core = cores_[core_index];
    CoreStats& st = core.stats;
    const Addr v = mask_va(access.vaddr, geom_) & ~Addr{3};
    StepResponse resp;

    const HitResult hr = core.cache.hit_check_and_access(access.rw, v, access.data);
    if (hr.hit) {
        resp.hit = true;
        resp.cycles = 1;
        st.ledger.hit_cycles += 1;
        st.total_cycles += 1;
        record(ControllerLogEntry::Kind::Hit, core_index, v);
        if (access.rw == Access::Read) {
            ++st.read_hits;
            resp.rdata = hr.rdata;
        } else {
            ++st.write_hits;
            // A resident line was filled through this mapping, so translation succeeds.
            const Addr p = translate(access.ctx, v, page_table_, geom_);
            coherent_write(core_index, p, access.data);
            if (geom_.synonym_limit > 1) write_hit_synonyms(core_index, v, p);
        }
        return resp;
    }

    record(ControllerLogEntry::Kind::MissStarted, core_index, v);
    core.controller.mode = ControllerMode::MissPendingAwaitInvalidate;
    CorePort port(*this, core_index);
    auto phase = [&](MissPhase ph) {
        if (ph == MissPhase::AwaitLine) core.controller.mode = ControllerMode::MissPendingAwaitLine;
        if (observer) observer(ph);
    };

    MissResult miss;
    try {
        miss = handle_miss(access.rw, access.ctx, v, access.data, page_table_, core.rlut, core.cache, port,
                           config_.latencies, phase);
    } catch (const TranslationFault&) {
        core.controller.mode = ControllerMode::Ready;
        ++st.translation_faults;
        resp.faulted = true;
        return resp;
    }
    core.controller.mode = ControllerMode::Ready;
    record(ControllerLogEntry::Kind::LineFilled, core_index, miss.p);

    if (access.rw == Access::Read) {
        ++st.read_misses;
        resp.rdata = load_word(miss.line, (miss.p & (geom_.line_size - 1)) & ~Addr{3});
    } else {
        ++st.write_misses;
    }
    st.synonym_evictions += miss.synonym_invalidations;
    st.rlut_displacements += miss.displacement_invalidations;
    st.stale_invalidation_noops += miss.stale_noops;
    st.ledger.rlut_inserts += 1;
    st.ledger.rlut_busy_cycles += kRlutInsertCycles;
    st.ledger.miss_cycles += miss.cycles;
    st.total_cycles += miss.cycles;
    resp.cycles = miss.cycles;

    drain(core_index);
    return resp;
}

SimStats MemorySystem::stats() const {
    SimStats s;
    for (const Core& c : cores_) s.cores.push_back(c.stats);
    s.max_invalidate_queue_depth = max_queue_depth_;
    return s;
}

}  // namespace vivt
