#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vivt/addr.hpp"

namespace vivt {

enum class Access { Read, Write };

/// A line position in the VIVT cache: set index plus the virtual tag stored there.
struct VirtualLineRef {
    std::uint64_t index = 0;
    std::uint64_t vtag = 0;

    friend bool operator==(const VirtualLineRef&, const VirtualLineRef&) = default;
};

[[nodiscard]] inline VirtualLineRef line_ref(Addr v, const Geometry& g) {
    return {vivt_index(v, g), vivt_tag(v, g)};
}

struct HitResult {
    bool hit = false;
    std::uint32_t rdata = 0;
};

[[nodiscard]] std::uint32_t load_word(std::span<const std::uint8_t> bytes, std::size_t offset);
void store_word(std::span<std::uint8_t> bytes, std::size_t offset, std::uint32_t word);

// Write-through allocate VIVT cache with 2^r ways per set and strict LRU.
// Homonyms are excluded by flushing on context switches, so lines carry no context id.
class CacheState {
public:
    explicit CacheState(const Geometry& g);

    [[nodiscard]] const Geometry& geometry() const { return geom_; }

    /// Tag and data in one step. A write hit updates the cached word only;
    /// write-through is left to the caller. A miss leaves the state untouched.
    HitResult hit_check_and_access(Access rw, Addr v, std::uint32_t wdata = 0);

    /// Installs `line` for v's line, choosing an invalid way or else the LRU way.
    /// Returns the valid line displaced by the fill, if any.
    std::optional<VirtualLineRef> fill_line(Addr v, std::span<const std::uint8_t> line);

    /// Clears the valid line at `index` whose vtag equals `vtag`; with no vtag, every
    /// valid way of the set. Idempotent. Returns whether anything was cleared.
    bool invalidate_virtual_line(std::uint64_t index, std::optional<std::uint64_t> vtag);
    bool invalidate_virtual_line(const VirtualLineRef& ref) { return invalidate_virtual_line(ref.index, ref.vtag); }

    void flush_all();

    [[nodiscard]] bool contains(Addr v) const;
    [[nodiscard]] std::size_t valid_line_count() const;
    [[nodiscard]] std::size_t valid_in_set(std::uint64_t index) const;

    /// Visits every valid line as (line-aligned virtual address, line bytes).
    template <class Fn>
    void for_each_valid(Fn&& fn) const {
        for (std::size_t slot = 0; slot < lines_.size(); ++slot) {
            const Line& l = lines_[slot];
            if (!l.valid) continue;
            const std::uint64_t set = slot / geom_.ways;
            fn(virtual_line_address(set, l.vtag, geom_), bytes(slot));
        }
    }

private:
    struct Line {
        bool valid = false;
        std::uint64_t vtag = 0;
        std::uint64_t last_use = 0;  // LRU rank; larger is more recent
    };

    [[nodiscard]] std::optional<std::size_t> find(std::uint64_t set, std::uint64_t vtag) const;
    [[nodiscard]] std::span<const std::uint8_t> bytes(std::size_t slot) const;
    [[nodiscard]] std::span<std::uint8_t> bytes(std::size_t slot);

    Geometry geom_;
    std::vector<Line> lines_;
    std::vector<std::uint8_t> data_;
    std::uint64_t use_clock_ = 0;
};

}  // namespace vivt
