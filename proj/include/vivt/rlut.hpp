#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vivt/addr.hpp"
#include "vivt/cache.hpp"

namespace vivt {

inline constexpr unsigned kRlutLookupCycles = 1;  // pipelined, one lookup per cycle
inline constexpr unsigned kRlutInsertCycles = 2;  // lookup-and-insert, not pipelined

/// What the cache must invalidate after a lookup-and-insert.
struct InvalidationPlan {
    std::optional<VirtualLineRef> evict;   // synonym slot overwritten by the new address
    std::vector<VirtualLineRef> others;    // remaining synonyms of the same physical line
    std::vector<VirtualLineRef> displaced; // residents of another physical line whose entry was reallocated

    friend bool operator==(const InvalidationPlan&, const InvalidationPlan&) = default;
};

// Reverse lookup table: rlut_sets x rlut_ways entries indexed by the physical line
// offset within a page and tagged by the physical page number. Each entry holds up to
// S synonym slots. A slot stores the virtual page number; combined with the physical
// in-page line bits it reconstructs the virtual line's set index and vtag.
class Rlut {
public:
    struct Slot {
        bool valid = false;
        std::uint64_t vpage = 0;
    };
    struct Entry {
        bool valid = false;
        std::uint64_t ptag = 0;
        std::vector<Slot> slots;
        std::uint32_t replace_ptr = 0;
    };

    explicit Rlut(const Geometry& g);

    [[nodiscard]] const Geometry& geometry() const { return geom_; }

    /// Synonyms recorded for p's line; empty when p has no entry. No side effects.
    [[nodiscard]] std::vector<VirtualLineRef> lookup(Addr p) const;

    /// Records p -> v and reports the lines the cache must drop to keep at most S synonyms.
    InvalidationPlan lookup_and_insert(Addr p, Addr v);

    /// Whether v's page is recorded as a synonym of p's line.
    [[nodiscard]] bool records(Addr p, Addr v) const;

    void clear();

    [[nodiscard]] const Entry& entry(std::uint64_t set, std::uint64_t way) const {
        return entries_[set * geom_.rlut_ways + way];
    }
    /// Physical line address covered by a valid entry.
    [[nodiscard]] Addr entry_line_address(std::uint64_t set, std::uint64_t way) const;
    [[nodiscard]] VirtualLineRef reconstruct(Addr p, std::uint64_t vpage) const;

private:
    [[nodiscard]] std::vector<VirtualLineRef> refs_of(const Entry& e, Addr p, std::optional<std::size_t> skip) const;

    Geometry geom_;
    std::vector<Entry> entries_;
    std::vector<std::uint32_t> way_replace_ptr_;
};

/// RLUT storage in bytes for an S-synonym-safe cache with 64-byte lines, 4 KB pages
/// and 36-bit physical addresses: ((cache_size/64) * (24 + 3S)) / 8, zero up to 4 KB.
[[nodiscard]] std::uint64_t bytes_needed(std::uint64_t cache_size, unsigned s);

}  // namespace vivt
