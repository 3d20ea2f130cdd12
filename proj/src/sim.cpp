#include "vivt/sim.hpp"

#include <array>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "vivt/text.hpp"

namespace vivt {

// ---- configuration file -------------------------------------------------------

namespace {

std::optional<std::uint64_t> parse_size(std::string_view s) {
    std::uint64_t scale = 1;
    auto ends_with = [&](std::string_view suffix) {
        return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
    };
    for (auto [suffix, mult] : std::array<std::pair<std::string_view, std::uint64_t>, 4>{
             {{"KB", 1024}, {"MB", 1024 * 1024}, {"K", 1024}, {"M", 1024 * 1024}}}) {
        if (ends_with(suffix)) {
            s.remove_suffix(suffix.size());
            scale = mult;
            break;
        }
    }
    auto v = text::parse_uint(text::trim(s), 10);
    if (!v) return std::nullopt;
    return *v * scale;
}

}  // namespace

SystemConfig parse_config(std::string_view input) {
    SystemConfig cfg;
    text::for_each_line(input, [&](std::size_t n, std::string_view raw) {
        const auto line = text::strip_comment(raw);
        if (line.empty()) return;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(n, "expected 'key = value'");
        const auto key = text::trim(line.substr(0, eq));
        const auto value_text = text::trim(line.substr(eq + 1));
        const auto value = parse_size(value_text);
        if (!value) throw ParseError(n, fmt::format("bad value '{}' for {}", value_text, key));
        auto narrow = [&]() -> unsigned {
            if (*value > 0xFFFFFFFFu) throw ParseError(n, fmt::format("{} out of range", key));
            return static_cast<unsigned>(*value);
        };
        if (key == "cache_size") cfg.cache.cache_size = *value;
        else if (key == "line_size") cfg.cache.line_size = *value;
        else if (key == "assoc_log2") cfg.cache.associativity_log2 = narrow();
        else if (key == "page_size") cfg.cache.page_size = *value;
        else if (key == "va_width") cfg.cache.va_width = narrow();
        else if (key == "pa_width") cfg.cache.pa_width = narrow();
        else if (key == "synonym_limit") cfg.cache.synonym_limit = narrow();
        else if (key == "cores") cfg.cores = narrow();
        else if (key == "translate_latency") cfg.latencies.translate = narrow();
        else if (key == "fetch_latency") cfg.latencies.fetch = narrow();
        else throw ParseError(n, fmt::format("unknown key '{}'", key));
    });
    validate(cfg.cache);
    if (cfg.cores == 0) throw ConfigError("cores", "must be at least 1");
    return cfg;
}

std::string format_config(const SystemConfig& c) {
    return fmt::format(
        "cache_size = {}\nline_size = {}\nassoc_log2 = {}\npage_size = {}\nva_width = {}\npa_width = {}\n"
        "synonym_limit = {}\ncores = {}\ntranslate_latency = {}\nfetch_latency = {}\n",
        c.cache.cache_size, c.cache.line_size, c.cache.associativity_log2, c.cache.page_size, c.cache.va_width,
        c.cache.pa_width, c.cache.synonym_limit, c.cores, c.latencies.translate, c.latencies.fetch);
}

// ---- trace engine ---------------------------------------------------------------

CheckFailure::CheckFailure(std::size_t event_index, std::vector<Violation> violations, std::string detail)
    : std::runtime_error(fmt::format("event {}: {}", event_index, detail)),
      event_index_(event_index),
      violations_(std::move(violations)) {}

RunOutcome run_trace(const std::vector<TraceEvent>& events, const SystemConfig& config, const PageTable& page_table,
                     const RunOptions& options) {
    MemorySystem sys(config, page_table);
    const Geometry& g = sys.geometry();
    FlatMemoryOracle oracle;
    std::uint64_t mismatches = 0;

    auto require_core = [&](std::size_t index, unsigned core) {
        if (core >= sys.core_count())
            throw std::invalid_argument(fmt::format("event {}: core {} out of range ({} cores)", index, core,
                                                    sys.core_count()));
    };

    for (std::size_t i = 0; i < events.size(); ++i) {
        std::optional<std::size_t> touched;
        std::optional<std::string> mismatch;
        const auto& ev = events[i];

        if (const auto* r = std::get_if<ReadEvent>(&ev)) {
            require_core(i, r->core);
            touched = r->core;
            const auto resp = sys.controller_step(r->core, {Access::Read, r->ctx, r->vaddr, 0});
            if (!resp.faulted) {
                const Addr p = translate(r->ctx, r->vaddr, page_table, g);
                const std::uint32_t want = oracle.oracle_read(p);
                if (*resp.rdata != want) {
                    ++mismatches;
                    mismatch = fmt::format("read of {:#x} on core {} returned {:#x}, oracle {:#x}", r->vaddr, r->core,
                                           *resp.rdata, want);
                }
            }
        } else if (const auto* w = std::get_if<WriteEvent>(&ev)) {
            require_core(i, w->core);
            touched = w->core;
            const auto resp = sys.controller_step(w->core, {Access::Write, w->ctx, w->vaddr, w->data});
            if (!resp.faulted) oracle.oracle_write(translate(w->ctx, w->vaddr, page_table, g), w->data);
        } else if (const auto* x = std::get_if<ContextSwitchEvent>(&ev)) {
            require_core(i, x->core);
            touched = x->core;
            sys.context_switch(x->core, x->new_ctx);
        } else if (const auto* inv = std::get_if<ExternalInvalidateEvent>(&ev)) {
            sys.external_invalidate(inv->paddr);
        }

        if (options.check_mode) {
            if (mismatch) throw CheckFailure(i, {}, *mismatch);
            if (touched) {
                auto violations = check_invariants(sys, CheckOptions{options.check_data, touched});
                if (!violations.empty()) {
                    const std::string detail = violations.front().message;
                    throw CheckFailure(i, std::move(violations), detail);
                }
            }
        }
    }

    sys.drain_all();
    RunOutcome out;
    out.violations = check_invariants(sys);
    out.stats = sys.stats();
    out.stats.oracle_mismatches = mismatches;
    out.stats.events = events.size();
    out.final_memory = sys.memory();
    return out;
}

// ---- trace generator ----------------------------------------------------------

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::uint32_t word() { return static_cast<std::uint32_t>(engine_() >> 32); }

private:
    std::mt19937_64 engine_;
};

}  // namespace

TraceBundle generate_trace(const GenParams& p, const Geometry& g) {
    if (p.write_ratio < 0.0 || p.write_ratio > 1.0) throw std::invalid_argument("write_ratio must be in [0, 1]");
    if (p.context_switch_ratio < 0.0 || p.context_switch_ratio > 1.0)
        throw std::invalid_argument("context_switch_ratio must be in [0, 1]");
    if (p.cores == 0) throw std::invalid_argument("cores must be at least 1");
    if (p.contexts == 0) throw std::invalid_argument("contexts must be at least 1");
    if (p.private_pages == 0) throw std::invalid_argument("private_pages must be at least 1");
    if (p.lines_per_page == 0 || p.lines_per_page > g.page_size / g.line_size)
        throw std::invalid_argument("lines_per_page must be in [1, page_size / line_size]");

    // Synonym members differ in their low k page-number bits where the geometry has any.
    const std::uint64_t members = g.k > 0 ? std::min<std::uint64_t>(std::uint64_t{1} << g.k, 8) : 2;
    const std::uint64_t stride = std::max<std::uint64_t>(16, members);
    const std::uint64_t private_vpn_base = 0x100;
    const std::uint64_t synonym_vpn_base = 0x400;
    const std::uint64_t private_ppn_base = 0x1000;
    const std::uint64_t synonym_ppn_base = 0x2000 + std::uint64_t{p.contexts} * p.private_pages;

    TraceBundle bundle;
    bundle.page_table = PageTable(false);
    for (ContextId ctx = 0; ctx < p.contexts; ++ctx) {
        for (std::uint64_t i = 0; i < p.private_pages; ++i)
            bundle.page_table.map(ctx, private_vpn_base + i, private_ppn_base + ctx * p.private_pages + i);
        for (std::uint64_t grp = 0; grp < p.synonym_groups; ++grp) {
            for (std::uint64_t j = 0; j < members; ++j)
                bundle.page_table.map(ctx, synonym_vpn_base + grp * stride + j, synonym_ppn_base + grp);
        }
    }
    bundle.page_table.validate(g);

    Rng rng(p.seed);
    std::vector<ContextId> current(p.cores, 0);
    bundle.events.reserve(p.events);
    const std::uint64_t words_per_line = g.line_size / 4;
    for (std::size_t n = 0; n < p.events; ++n) {
        const auto core = static_cast<unsigned>(rng.below(p.cores));
        if (rng.unit() < p.context_switch_ratio) {
            current[core] = static_cast<ContextId>(rng.below(p.contexts));
            bundle.events.emplace_back(ContextSwitchEvent{core, current[core]});
            continue;
        }
        std::uint64_t vpn = 0;
        if (p.synonym_groups > 0 && rng.unit() < 0.5) {
            vpn = synonym_vpn_base + rng.below(p.synonym_groups) * stride + rng.below(members);
        } else {
            vpn = private_vpn_base + rng.below(p.private_pages);
        }
        const std::uint64_t offset = rng.below(p.lines_per_page) * g.line_size + 4 * rng.below(words_per_line);
        const Addr v = (vpn << g.page_bits) | offset;
        if (rng.unit() < p.write_ratio) {
            bundle.events.emplace_back(WriteEvent{core, current[core], v, rng.word()});
        } else {
            bundle.events.emplace_back(ReadEvent{core, current[core], v});
        }
    }
    return bundle;
}

// ---- reports ------------------------------------------------------------------

namespace {

constexpr std::array<const char*, 22> kColumns{
    "core",          "read_hits",     "read_misses",       "write_hits",
    "write_misses",  "synonym_evictions", "snoop_invalidations_applied", "stale_invalidation_noops",
    "rlut_displacements", "flushes", "translation_faults", "total_cycles",
    "hit_cycles",    "miss_cycles",   "snoop_cycles",      "rlut_lookups",
    "rlut_inserts",  "rlut_busy_cycles", "hit_ratio",      "max_invalidate_queue_depth",
    "oracle_mismatches", "events"};

template <class Stats>
auto counters(Stats& s) -> std::array<decltype(&s.read_hits), 17> {
    return {&s.read_hits,         &s.read_misses,       &s.write_hits,
            &s.write_misses,      &s.synonym_evictions, &s.snoop_invalidations_applied,
            &s.stale_invalidation_noops, &s.rlut_displacements, &s.flushes,
            &s.translation_faults, &s.total_cycles,     &s.ledger.hit_cycles,
            &s.ledger.miss_cycles, &s.ledger.snoop_cycles, &s.ledger.rlut_lookups,
            &s.ledger.rlut_inserts, &s.ledger.rlut_busy_cycles};
}

}  // namespace

CoreStats& CoreStats::operator+=(const CoreStats& o) {
    auto mine = counters(*this);
    const auto theirs = counters(o);
    for (std::size_t i = 0; i < mine.size(); ++i) *mine[i] += *theirs[i];
    return *this;
}

CoreStats SimStats::total() const {
    CoreStats t;
    for (const auto& c : cores) t += c;
    return t;
}

std::string stats_csv(const SimStats& stats) {
    std::string out;
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
        if (i) out += ',';
        out += kColumns[i];
    }
    out += '\n';
    auto row = [&](const std::string& label, CoreStats s) {
        out += label;
        for (const auto* c : counters(s)) out += fmt::format(",{}", *c);
        out += fmt::format(",{:.6f},{},{},{}\n", s.hit_ratio(), stats.max_invalidate_queue_depth,
                           stats.oracle_mismatches, stats.events);
    };
    for (std::size_t c = 0; c < stats.cores.size(); ++c) row(std::to_string(c), stats.cores[c]);
    row("total", stats.total());
    return out;
}

SimStats parse_stats_csv(std::string_view csv) {
    SimStats stats;
    bool header = true;
    text::for_each_line(csv, [&](std::size_t n, std::string_view raw) {
        const auto line = text::trim(raw);
        if (line.empty()) return;
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (cells.size() != kColumns.size()) throw ParseError(n, "wrong number of columns");
        if (header) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                if (cells[i] != kColumns[i]) throw ParseError(n, fmt::format("unexpected column '{}'", cells[i]));
            header = false;
            return;
        }
        auto num = [&](std::size_t i) {
            auto v = text::parse_uint(cells[i], 10);
            if (!v) throw ParseError(n, fmt::format("bad {} '{}'", kColumns[i], cells[i]));
            return *v;
        };
        stats.max_invalidate_queue_depth = num(19);
        stats.oracle_mismatches = num(20);
        stats.events = num(21);
        if (cells[0] == "total") return;
        CoreStats s;
        auto fields = counters(s);
        for (std::size_t i = 0; i < fields.size(); ++i) *fields[i] = num(i + 1);
        stats.cores.push_back(s);
    });
    if (header) throw ParseError(1, "missing header");
    return stats;
}

std::string stats_text(const SimStats& stats) {
    std::ostringstream os;
    auto block = [&](const std::string& title, const CoreStats& s) {
        os << title << '\n'
           << fmt::format("  reads    {:>10} hits {:>10} misses\n", s.read_hits, s.read_misses)
           << fmt::format("  writes   {:>10} hits {:>10} misses\n", s.write_hits, s.write_misses)
           << fmt::format("  hit ratio                {:.4f}\n", s.hit_ratio())
           << fmt::format("  synonym evictions        {}\n", s.synonym_evictions)
           << fmt::format("  snoop invalidations      {}\n", s.snoop_invalidations_applied)
           << fmt::format("  stale invalidation no-ops {}\n", s.stale_invalidation_noops)
           << fmt::format("  rlut displacements       {}\n", s.rlut_displacements)
           << fmt::format("  flushes                  {}\n", s.flushes)
           << fmt::format("  translation faults       {}\n", s.translation_faults)
           << fmt::format("  cycles                   {} (hit {}, miss {}, snoop {})\n", s.total_cycles,
                          s.ledger.hit_cycles, s.ledger.miss_cycles, s.ledger.snoop_cycles);
    };
    for (std::size_t c = 0; c < stats.cores.size(); ++c) block(fmt::format("core {}", c), stats.cores[c]);
    if (stats.cores.size() > 1) block("total", stats.total());
    os << fmt::format("events {}  max invalidate queue depth {}  oracle mismatches {}\n", stats.events,
                      stats.max_invalidate_queue_depth, stats.oracle_mismatches);
    return os.str();
}

}  // namespace vivt
