#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vivt/addr.hpp"
#include "vivt/cache.hpp"
#include "vivt/memory.hpp"
#include "vivt/rlut.hpp"

namespace vivt {

using ContextId = std::uint32_t;

class TranslationFault : public std::runtime_error {
public:
    TranslationFault(ContextId ctx, Addr v);
    [[nodiscard]] ContextId context() const { return ctx_; }
    [[nodiscard]] Addr address() const { return v_; }

private:
    ContextId ctx_;
    Addr v_;
};

/// Text-format error carrying the 1-based line number it was found on.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// (context, virtual page) -> physical page. Static for the duration of a run.
class PageTable {
public:
    PageTable() = default;
    explicit PageTable(bool default_identity) : identity_(default_identity) {}

    /// Adds a mapping; throws std::invalid_argument if (ctx, vpn) is already mapped.
    void map(ContextId ctx, std::uint64_t vpn, std::uint64_t ppn);
    [[nodiscard]] std::optional<std::uint64_t> lookup(ContextId ctx, std::uint64_t vpn) const;

    [[nodiscard]] bool default_identity() const { return identity_; }
    void set_default_identity(bool on) { identity_ = on; }
    [[nodiscard]] std::size_t size() const { return map_.size(); }

    /// Throws ConfigError if any page number does not fit the address widths.
    void validate(const Geometry& g) const;

    /// Serializes in the page-table file format, mappings sorted by (ctx, vpn).
    [[nodiscard]] std::string to_text() const;

private:
    struct Key {
        ContextId ctx;
        std::uint64_t vpn;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            return std::hash<std::uint64_t>{}(k.vpn * 0x9E3779B97F4A7C15ull ^ k.ctx);
        }
    };

    bool identity_ = false;
    std::unordered_map<Key, std::uint64_t, KeyHash> map_;
};

[[nodiscard]] std::optional<Addr> try_translate(ContextId ctx, Addr v, const PageTable& pt, const Geometry& g);
/// Throws TranslationFault when v's page is unmapped.
[[nodiscard]] Addr translate(ContextId ctx, Addr v, const PageTable& pt, const Geometry& g);

/// Parses `[identity on|off]` then `<ctx> <vpn-hex> <ppn-hex>` lines; `#` starts a comment.
/// `default_identity` applies when the header is absent.
[[nodiscard]] PageTable load_page_table(std::string_view text, bool default_identity = false);

struct Latencies {
    unsigned translate = 2;
    unsigned fetch = 8;
};

/// Controller-visible points of a miss transaction.
enum class MissPhase {
    AwaitInvalidate,  // translated, RLUT updated, synonym invalidations not yet applied
    AwaitLine,        // synonym invalidations applied, line not yet fetched
    LineArrived,      // line fetched, not yet installed
};

using MissObserver = std::function<void(MissPhase)>;

struct MissResult {
    Addr p = 0;
    std::vector<std::uint8_t> line;
    std::vector<VirtualLineRef> invalidations_issued;
    unsigned synonym_invalidations = 0;       // valid lines cleared for the S bound or a write miss
    unsigned displacement_invalidations = 0;  // valid lines cleared because their RLUT entry was reallocated
    unsigned stale_noops = 0;                 // issued invalidations that found no valid line
    std::uint64_t cycles = 0;
};

/// Miss-path transaction: translate, RLUT lookup-and-insert, synonym invalidations,
/// write-through (writes only), line fetch, fill. On a translation fault nothing is
/// modified and TranslationFault propagates.
MissResult handle_miss(Access rw, ContextId ctx, Addr v, std::uint32_t wdata, const PageTable& pt, Rlut& rlut,
                       CacheState& cache, MemoryPort& memory, const Latencies& lat = {},
                       const MissObserver& observer = {});

}  // namespace vivt
