#include "vivt/check.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

namespace vivt {

const char* to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::SynonymBound: return "synonym-bound";
        case Violation::Kind::LinesPerOffset: return "lines-per-offset";
        case Violation::Kind::StaleData: return "stale-data";
        case Violation::Kind::RlutStructure: return "rlut-structure";
        case Violation::Kind::RlutCoverage: return "rlut-coverage";
        case Violation::Kind::Untranslatable: return "untranslatable";
    }
    return "?";
}

namespace {

void check_rlut_structure(const Rlut& rlut, std::size_t core, std::vector<Violation>& out) {
    const Geometry& g = rlut.geometry();
    for (std::uint64_t set = 0; set < g.rlut_sets; ++set) {
        for (std::uint64_t way = 0; way < g.rlut_ways; ++way) {
            const auto& e = rlut.entry(set, way);
            if (!e.valid) continue;
            const Addr line = rlut.entry_line_address(set, way);
            for (std::uint64_t other = way + 1; other < g.rlut_ways; ++other) {
                const auto& o = rlut.entry(set, other);
                if (o.valid && o.ptag == e.ptag)
                    out.push_back({Violation::Kind::RlutStructure, core, line,
                                   fmt::format("physical line {:#x} has two RLUT entries", line)});
            }
            if (e.slots.size() > g.synonym_limit)
                out.push_back({Violation::Kind::RlutStructure, core, line,
                               fmt::format("entry for {:#x} has {} synonym slots", line, e.slots.size())});
            for (std::size_t i = 0; i < e.slots.size(); ++i) {
                for (std::size_t j = i + 1; j < e.slots.size(); ++j) {
                    if (e.slots[i].valid && e.slots[j].valid && e.slots[i].vpage == e.slots[j].vpage)
                        out.push_back({Violation::Kind::RlutStructure, core, line,
                                       fmt::format("entry for {:#x} records vpage {:#x} twice", line, e.slots[i].vpage)});
                }
            }
        }
    }
}

}  // namespace

std::vector<Violation> check_invariants(const MemorySystem& system, const CheckOptions& options) {
    const Geometry& g = system.geometry();
    const PageTable& pt = system.page_table();
    std::vector<Violation> out;

    for (std::size_t c = 0; c < system.core_count(); ++c) {
        if (options.only_core && *options.only_core != c) continue;
        const Core& core = system.core(c);

        std::unordered_set<Addr> pending;
        for (Addr p : core.controller.pending) pending.insert(line_address(p, g));

        std::unordered_map<Addr, unsigned> residents;  // physical line -> resident virtual lines
        core.cache.for_each_valid([&](Addr v, std::span<const std::uint8_t> bytes) {
            const auto p = try_translate(core.context, v, pt, g);
            if (!p) {
                out.push_back({Violation::Kind::Untranslatable, c, v,
                               fmt::format("resident line {:#x} does not translate in ctx {}", v, core.context)});
                return;
            }
            const Addr pline = line_address(*p, g);
            ++residents[pline];
            if (!core.rlut.records(pline, v))
                out.push_back({Violation::Kind::RlutCoverage, c, pline,
                               fmt::format("resident line {:#x} -> {:#x} is not in the RLUT", v, pline)});
            if (options.data && !pending.contains(pline)) {
                const auto* mem = system.memory().find_line(pline);
                const bool same = mem ? std::equal(bytes.begin(), bytes.end(), mem->begin())
                                      : std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
                if (!same)
                    out.push_back({Violation::Kind::StaleData, c, pline,
                                   fmt::format("line {:#x} (virtual {:#x}) differs from memory", pline, v)});
            }
        });

        std::unordered_map<std::uint64_t, unsigned> per_offset;
        for (const auto& [pline, count] : residents) {
            if (count > g.synonym_limit)
                out.push_back({Violation::Kind::SynonymBound, c, pline,
                               fmt::format("{} resident synonyms of {:#x}, limit {}", count, pline, g.synonym_limit)});
            ++per_offset[rlut_index(pline, g)];
        }
        for (const auto& [offset, count] : per_offset) {
            if (count > g.rlut_ways)
                out.push_back({Violation::Kind::LinesPerOffset, c, offset << g.line_bits,
                               fmt::format("{} physical lines resident at in-page line {}, limit {}", count, offset,
                                           g.rlut_ways)});
        }
        check_rlut_structure(core.rlut, c, out);
    }
    return out;
}

}  // namespace vivt
