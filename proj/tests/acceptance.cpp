// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   vivt_acceptance <path-to-vivtsim>

#include <chrono>
#include <cstdio>
#include <functional>
#include <future>
#include <iostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>

#include <fmt/format.h>

#include "vivt/sim.hpp"

using namespace vivt;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned budgets and sizes.
constexpr double kRlutSizeBudgetSeconds = 1.0;
constexpr double kCellBudgetSeconds = 60.0;
constexpr int kPropertySeeds = 20;
constexpr int kOracleSeeds = 10;
constexpr std::size_t kTraceEvents = 100'000;
constexpr unsigned kSynonymGroups = 4;
constexpr unsigned kPropertyCores = 4;
constexpr double kContextSwitchRatio = 0.001;
constexpr std::uint64_t kAllHitAccesses = 100'000;

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- 1: sizing table --------------------------------------------------------------

Verdict rlut_size_table(const std::string& cli) {
    Verdict v;
    if (cli.empty()) {
        v.require(false, "no vivtsim path given");
        return v;
    }
    const auto start = Clock::now();
    FILE* pipe = popen((cli + " rlut-size").c_str(), "r");
    if (!pipe) {
        v.require(false, "cannot launch " + cli);
        return v;
    }
    std::set<std::tuple<unsigned, unsigned, unsigned>> rows;
    std::size_t row_count = 0;
    char buf[256];
    while (std::fgets(buf, sizeof buf, pipe)) {
        unsigned kb = 0, s = 0, bytes = 0;
        if (std::sscanf(buf, " %uKB %u %u", &kb, &s, &bytes) == 3) {
            rows.emplace(kb, s, bytes);
            ++row_count;
        }
    }
    const int status = pclose(pipe);
    const double elapsed = seconds_since(start);

    const std::set<std::tuple<unsigned, unsigned, unsigned>> expected{
        {4, 1, 0}, {8, 1, 432}, {16, 1, 864}, {32, 1, 1728}, {4, 2, 0}, {8, 2, 480}, {16, 2, 960}, {32, 2, 1920}};
    v.require(status == 0, "rlut-size exited non-zero");
    v.require(row_count == 8 && rows == expected, fmt::format("got {} rows, expected the 8 reference rows", row_count));
    v.require(elapsed < kRlutSizeBudgetSeconds, fmt::format("took {:.3f} s", elapsed));
    if (v.pass) v.detail = fmt::format("8/8 rows exact, {:.3f} s", elapsed);
    return v;
}

// ---- 2: reference geometry --------------------------------------------------------

Verdict reference_geometry() {
    Verdict v;
    const Geometry g = derive_geometry(CacheConfig{32 * 1024, 64, 0, 4 * 1024, 32, 36, 1});
    v.require(g.set_index_high == 14 && g.set_index_low == 6, "set index bits");
    v.require(g.rlut_ways == 8 && g.rlut_sets == 64, "RLUT shape");
    v.require(g.rlut_index_high == 11 && g.rlut_index_low == 6, "RLUT index bits");
    v.require(g.rlut_tag_high == 35 && g.rlut_tag_low == 12, "RLUT tag bits");
    v.require(g.k == 3, "synonym slot width");
    if (v.pass) v.detail = "index [14:6], RLUT 8x64, RLUT index [11:6], tag [35:12], 3-bit slots";
    return v;
}

// ---- 3: synonym bound under random traffic ---------------------------------------

struct SeedResult {
    std::uint64_t bound_violations = 0;  // (a), (b), (d)
    std::uint64_t other_failures = 0;
    std::uint64_t synonym_evictions = 0;
    std::string first_failure;
};

bool counts_for_bound(Violation::Kind k) {
    return k == Violation::Kind::SynonymBound || k == Violation::Kind::LinesPerOffset ||
           k == Violation::Kind::RlutStructure || k == Violation::Kind::RlutCoverage;
}

SeedResult property_seed(unsigned s, unsigned r, std::uint64_t seed) {
    SystemConfig cfg;
    cfg.cores = kPropertyCores;
    cfg.cache.synonym_limit = s;
    cfg.cache.associativity_log2 = r;
    GenParams p;
    p.seed = seed;
    p.cores = cfg.cores;
    p.events = kTraceEvents;
    p.synonym_groups = kSynonymGroups;
    p.context_switch_ratio = kContextSwitchRatio;
    const auto bundle = generate_trace(p, derive_geometry(cfg.cache));

    SeedResult res;
    try {
        const auto out = run_trace(bundle.events, cfg, bundle.page_table, {.check_mode = true});
        for (const auto& viol : out.violations) (counts_for_bound(viol.kind) ? res.bound_violations : res.other_failures)++;
        res.other_failures += out.stats.oracle_mismatches;
        res.synonym_evictions = out.stats.total().synonym_evictions;
        if (!out.violations.empty()) res.first_failure = out.violations.front().message;
    } catch (const CheckFailure& f) {
        for (const auto& viol : f.violations()) (counts_for_bound(viol.kind) ? res.bound_violations : res.other_failures)++;
        if (f.violations().empty()) ++res.other_failures;
        res.first_failure = f.what();
    }
    return res;
}

Verdict synonym_bound_property() {
    Verdict v;
    double slowest = 0;
    std::uint64_t evictions = 0;
    for (unsigned s : {1u, 2u, 4u}) {
        for (unsigned r : {0u, 1u, 2u}) {
            const auto start = Clock::now();
            std::vector<std::future<SeedResult>> runs;
            for (int seed = 1; seed <= kPropertySeeds; ++seed)
                runs.push_back(std::async(std::launch::async, property_seed, s, r, 1000 * s + 100 * r + seed));
            SeedResult cell;
            for (auto& f : runs) {
                const auto res = f.get();
                cell.bound_violations += res.bound_violations;
                cell.other_failures += res.other_failures;
                cell.synonym_evictions += res.synonym_evictions;
                if (cell.first_failure.empty()) cell.first_failure = res.first_failure;
            }
            const double elapsed = seconds_since(start);
            slowest = std::max(slowest, elapsed);
            evictions += cell.synonym_evictions;
            v.require(cell.bound_violations == 0,
                      fmt::format("S={} r={}: {} violations ({})", s, r, cell.bound_violations, cell.first_failure));
            v.require(cell.other_failures == 0,
                      fmt::format("S={} r={}: {} data/oracle failures ({})", s, r, cell.other_failures,
                                  cell.first_failure));
            v.require(cell.synonym_evictions > 0, fmt::format("S={} r={}: traffic exercised no synonyms", s, r));
            v.require(elapsed < kCellBudgetSeconds, fmt::format("S={} r={}: cell took {:.1f} s", s, r, elapsed));
        }
    }
    if (v.pass)
        v.detail = fmt::format("9 cells x {} seeds x {} events, 0 violations, {} synonym evictions, slowest cell {:.1f} s",
                               kPropertySeeds, kTraceEvents, evictions, slowest);
    return v;
}

// ---- 4: oracle equivalence ----------------------------------------------------------

Verdict oracle_equivalence() {
    Verdict v;
    std::uint64_t reads = 0, switches = 0;
    for (unsigned cores : {1u, 4u}) {
        std::vector<std::future<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, bool>>> runs;
        for (int seed = 1; seed <= kOracleSeeds; ++seed) {
            runs.push_back(std::async(std::launch::async, [cores, seed] {
                SystemConfig cfg;
                cfg.cores = cores;
                GenParams p;
                p.seed = 7000 + seed;
                p.cores = cores;
                p.events = kTraceEvents;
                p.write_ratio = 0.3;
                p.context_switch_ratio = kContextSwitchRatio;
                const auto bundle = generate_trace(p, derive_geometry(cfg.cache));
                const auto out = run_trace(bundle.events, cfg, bundle.page_table);
                const auto t = out.stats.total();
                return std::tuple{out.stats.oracle_mismatches, t.read_hits + t.read_misses, t.flushes,
                                  out.violations.empty()};
            }));
        }
        for (auto& f : runs) {
            const auto [mismatches, r, flushes, clean] = f.get();
            reads += r;
            switches += flushes;
            v.require(mismatches == 0, fmt::format("{} cores: {} oracle mismatches", cores, mismatches));
            v.require(clean, fmt::format("{} cores: invariant violations at quiescence", cores));
        }
    }
    v.require(switches > 0, "no context switches were exercised");
    if (v.pass)
        v.detail = fmt::format("1 and 4 cores x {} seeds, {} reads matched, {} context switches", kOracleSeeds, reads,
                               switches);
    return v;
}

// ---- 5: scripted synonym scenarios --------------------------------------------------

struct Counters {
    std::uint64_t synonym_evictions, snoop_invalidations_applied, stale_invalidation_noops;
    friend bool operator==(const Counters&, const Counters&) = default;
};

Verdict scripted_scenarios() {
    Verdict v;
    auto run = [](unsigned s, const PageTable& pt, const std::string& trace) {
        SystemConfig cfg;
        cfg.cache.synonym_limit = s;
        return run_trace(parse_trace(trace), cfg, pt);
    };
    auto counters = [](const RunOutcome& o) {
        const auto t = o.stats.total();
        return Counters{t.synonym_evictions, t.snoop_invalidations_applied, t.stale_invalidation_noops};
    };
    auto describe = [](const Counters& c) {
        return fmt::format("({}, {}, {})", c.synonym_evictions, c.snoop_invalidations_applied, c.stale_invalidation_noops);
    };

    PageTable pair;  // V1 = 0x1080 and V2 = 0x5080 both map to P = 0x40080
    pair.map(0, 0x1, 0x40);
    pair.map(0, 0x5, 0x40);
    PageTable triple;  // three synonym pages onto one frame
    for (std::uint64_t vpn : {1u, 2u, 3u}) triple.map(0, vpn, 0x99);

    // (i) S=1: V1, V2, V1. Each miss evicts the other synonym.
    {
        const auto out = run(1, pair, "R 0 0 1080\nR 0 0 5080\nR 0 0 1080\n");
        const Counters want{2, 0, 0};
        v.require(counters(out) == want && out.stats.cores[0].read_misses == 3 && out.ok(),
                  "(i) got " + describe(counters(out)));
    }
    // (ii) S=2: V1, V2 resident; write miss on V3 evicts V1 from the slot and invalidates V2 too.
    {
        const auto out = run(2, triple, "R 0 0 1100\nR 0 0 2100\nW 0 0 3100 5a5a5a5a\nR 0 0 1100\nR 0 0 2100\n");
        // Write: V1 and V2 invalidated (2). Entry is now {V3, V2} with V2 gone, so re-reading V1
        // replaces the V2 slot for nothing (1 stale no-op); re-reading V2 then replaces V3 (3).
        const Counters want{3, 0, 1};
        const auto& c = out.stats.cores[0];
        v.require(counters(out) == want && c.read_misses == 4 && c.write_misses == 1 && out.ok(),
                  "(ii) got " + describe(counters(out)));
    }
    // (iii) S=2, both synonyms resident; one snoop for P clears both.
    {
        const auto out = run(2, pair, "R 0 0 1080\nR 0 0 5080\nI 40080\nR 0 0 1080\nR 0 0 5080\n");
        const Counters want{0, 2, 0};
        v.require(counters(out) == want && out.stats.cores[0].read_misses == 4 && out.ok(),
                  "(iii) got " + describe(counters(out)));
    }
    // (iv) S=1, identity: a conflict evicts 0x1040 but its RLUT entry stays; the snoop finds nothing.
    {
        const auto out = run(1, PageTable(true), "R 0 0 1040\nR 0 0 11040\nI 1040\nR 0 0 11040\n");
        const Counters want{0, 0, 1};
        v.require(counters(out) == want && out.stats.cores[0].read_hits == 1 && out.ok(),
                  "(iv) got " + describe(counters(out)));
    }
    if (v.pass) v.detail = "(i) (ii) (iii) (iv) counters exact";
    return v;
}

// ---- 6: timing -------------------------------------------------------------------

Verdict timing_contracts() {
    Verdict v;

    // All hits: prime 64 lines, then N reads and writes over them.
    {
        MemorySystem sys({}, PageTable(true));
        for (Addr i = 0; i < 64; ++i) sys.controller_step(0, {Access::Read, 0, 0x10000 + i * 64, 0});
        const auto before = sys.core(0).stats;
        for (std::uint64_t n = 0; n < kAllHitAccesses; ++n) {
            const Addr a = 0x10000 + (n % 64) * 64 + 4 * (n % 16);
            sys.controller_step(0, {n % 3 ? Access::Read : Access::Write, 0, a, static_cast<std::uint32_t>(n)});
        }
        const auto& after = sys.core(0).stats;
        v.require(after.hits() - before.hits() == kAllHitAccesses, "priming left misses in the all-hit run");
        v.require(after.total_cycles - before.total_cycles == kAllHitAccesses,
                  fmt::format("{} hits cost {} cycles", kAllHitAccesses, after.total_cycles - before.total_cycles));
    }

    // Misses: each costs translate + fetch while the fetch covers the 2-cycle insert.
    for (auto [t, f] : {std::pair{2u, 8u}, {1u, 2u}, {3u, 20u}}) {
        SystemConfig cfg;
        cfg.latencies = {t, f};
        MemorySystem sys(cfg, PageTable(true));
        const std::uint64_t misses = 256;
        for (Addr i = 0; i < misses; ++i) sys.controller_step(0, {Access::Read, 0, 0x20000 + i * 64, 0});
        const auto& st = sys.core(0).stats;
        v.require(st.read_misses == misses, "cold lines hit");
        v.require(st.total_cycles == misses * (t + f),
                  fmt::format("t={} f={}: {} misses cost {} cycles", t, f, misses, st.total_cycles));
        v.require(st.ledger.rlut_inserts == misses && st.ledger.rlut_busy_cycles == 2 * misses,
                  "insert occupancy not 2 cycles per miss");
    }

    // Snoop lookups: K queued invalidations drain in K cycles, one lookup each.
    {
        MemorySystem sys({}, PageTable(true));
        const std::uint64_t k = 1000;
        for (Addr i = 0; i < k; ++i) sys.external_invalidate(0x30000 + i * 64);
        sys.drain(0);
        const auto& ledger = sys.core(0).stats.ledger;
        v.require(ledger.rlut_lookups == k && ledger.snoop_cycles == k,
                  fmt::format("{} snoops took {} lookups in {} cycles", k, ledger.rlut_lookups, ledger.snoop_cycles));
    }
    if (v.pass) v.detail = fmt::format("{} hits = {} cycles, miss = t + f, 1 RLUT lookup per cycle", kAllHitAccesses,
                                       kAllHitAccesses);
    return v;
}

// ---- 7: invalidate arriving mid-miss -------------------------------------------------

Verdict mid_miss_race() {
    Verdict v;
    int scenarios = 0;
    for (unsigned s : {1u, 2u}) {
        for (MissPhase inject : {MissPhase::AwaitInvalidate, MissPhase::AwaitLine, MissPhase::LineArrived}) {
            SystemConfig cfg;
            cfg.cores = 2;
            cfg.cache.synonym_limit = s;
            PageTable pt;
            pt.map(0, 0x1, 0x40);
            pt.map(0, 0x5, 0x40);
            MemorySystem sys(cfg, pt);

            sys.controller_step(0, {Access::Read, 0, 0x1080, 0});  // V1 resident on core 0
            bool fired = false;
            sys.controller_step(0, {Access::Read, 0, 0x5080, 0}, [&](MissPhase ph) {
                if (ph != inject || fired) return;
                fired = true;
                // Core 1 writes P through its own mapping while core 0's miss on V2 is outstanding.
                sys.controller_step(1, {Access::Write, 0, 0x1084, 0xFEEDBEEF});
            });
            const std::string where = fmt::format("S={} phase {}", s, static_cast<int>(inject));
            v.require(fired, where + ": injection point never reached");
            v.require(sys.core(0).controller.pending.empty(), where + ": queue not drained");

            bool stale = false;
            sys.core(0).cache.for_each_valid([&](Addr va, std::span<const std::uint8_t> bytes) {
                if (const auto p = try_translate(0, va, pt, sys.geometry()))
                    stale = stale || load_word(bytes, 4) != sys.memory().read_word(*p + 4);
            });
            v.require(!stale, where + ": stale copy survived");
            v.require(check_invariants(sys).empty(), where + ": invariants violated");
            for (Addr va : {Addr{0x1084}, Addr{0x5084}}) {
                const auto resp = sys.controller_step(0, {Access::Read, 0, va, 0});
                v.require(resp.rdata == 0xFEEDBEEFu, where + ": read returned old data");
            }
            ++scenarios;
        }
    }
    if (v.pass) v.detail = fmt::format("{} interleavings, no stale copy after drain", scenarios);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"RLUT sizing table", [&] { return rlut_size_table(cli); }},
        {"reference geometry", reference_geometry},
        {"S-synonym bound property suite", synonym_bound_property},
        {"flat-memory oracle equivalence", oracle_equivalence},
        {"scripted synonym scenarios", scripted_scenarios},
        {"timing contracts", timing_contracts},
        {"mid-miss invalidate race", mid_miss_race},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, fmt::format("threw: {}", e.what()));
        }
        failed += !v.pass;
        std::cout << fmt::format("{} {}. {}: {}", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail)
                  << std::endl;
    }
    return failed ? 1 : 0;
}
