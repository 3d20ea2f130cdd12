#include "vivt/cache.hpp"

#include <algorithm>
#include <cassert>

namespace vivt {

std::uint32_t load_word(std::span<const std::uint8_t> bytes, std::size_t offset) {
    assert(offset + 4 <= bytes.size());
    return static_cast<std::uint32_t>(bytes[offset]) | static_cast<std::uint32_t>(bytes[offset + 1]) << 8 |
           static_cast<std::uint32_t>(bytes[offset + 2]) << 16 | static_cast<std::uint32_t>(bytes[offset + 3]) << 24;
}

void store_word(std::span<std::uint8_t> bytes, std::size_t offset, std::uint32_t word) {
    assert(offset + 4 <= bytes.size());
    for (std::size_t i = 0; i < 4; ++i) bytes[offset + i] = static_cast<std::uint8_t>(word >> (8 * i));
}

CacheState::CacheState(const Geometry& g)
    : geom_(g), lines_(g.num_sets * g.ways), data_(g.num_sets * g.ways * g.line_size, 0) {}

std::span<const std::uint8_t> CacheState::bytes(std::size_t slot) const {
    return {data_.data() + slot * geom_.line_size, geom_.line_size};
}

std::span<std::uint8_t> CacheState::bytes(std::size_t slot) {
    return {data_.data() + slot * geom_.line_size, geom_.line_size};
}

std::optional<std::size_t> CacheState::find(std::uint64_t set, std::uint64_t vtag) const {
    const std::size_t base = set * geom_.ways;
    for (std::size_t w = 0; w < geom_.ways; ++w) {
        const Line& l = lines_[base + w];
        if (l.valid && l.vtag == vtag) return base + w;
    }
    return std::nullopt;
}

HitResult CacheState::hit_check_and_access(Access rw, Addr v, std::uint32_t wdata) {
    v = mask_va(v, geom_);
    const auto slot = find(vivt_index(v, geom_), vivt_tag(v, geom_));
    if (!slot) return {};
    lines_[*slot].last_use = ++use_clock_;
    const std::size_t offset = (v & (geom_.line_size - 1)) & ~std::size_t{3};
    if (rw == Access::Write) {
        store_word(bytes(*slot), offset, wdata);
        return {true, wdata};
    }
    return {true, load_word(bytes(*slot), offset)};
}

std::optional<VirtualLineRef> CacheState::fill_line(Addr v, std::span<const std::uint8_t> line) {
    assert(line.size() == geom_.line_size);
    v = mask_va(v, geom_);
    const std::uint64_t set = vivt_index(v, geom_);
    const std::uint64_t vtag = vivt_tag(v, geom_);
    const std::size_t base = set * geom_.ways;

    std::optional<VirtualLineRef> evicted;
    std::size_t slot = base;
    if (auto same = find(set, vtag)) {
        slot = *same;
    } else {
        auto begin = lines_.begin() + static_cast<std::ptrdiff_t>(base);
        auto end = begin + static_cast<std::ptrdiff_t>(geom_.ways);
        auto invalid = std::find_if(begin, end, [](const Line& l) { return !l.valid; });
        if (invalid != end) {
            slot = static_cast<std::size_t>(invalid - lines_.begin());
        } else {
            auto lru = std::min_element(begin, end, [](const Line& a, const Line& b) { return a.last_use < b.last_use; });
            slot = static_cast<std::size_t>(lru - lines_.begin());
            evicted = VirtualLineRef{set, lru->vtag};
        }
    }

    lines_[slot] = Line{true, vtag, ++use_clock_};
    std::copy(line.begin(), line.end(), bytes(slot).begin());
    return evicted;
}

bool CacheState::invalidate_virtual_line(std::uint64_t index, std::optional<std::uint64_t> vtag) {
    if (index >= geom_.num_sets) return false;
    bool cleared = false;
    const std::size_t base = index * geom_.ways;
    for (std::size_t w = 0; w < geom_.ways; ++w) {
        Line& l = lines_[base + w];
        if (l.valid && (!vtag || l.vtag == *vtag)) {
            l.valid = false;
            cleared = true;
        }
    }
    return cleared;
}

void CacheState::flush_all() {
    for (Line& l : lines_) l.valid = false;
}

bool CacheState::contains(Addr v) const {
    v = mask_va(v, geom_);
    return find(vivt_index(v, geom_), vivt_tag(v, geom_)).has_value();
}

std::size_t CacheState::valid_line_count() const {
    return static_cast<std::size_t>(std::count_if(lines_.begin(), lines_.end(), [](const Line& l) { return l.valid; }));
}

std::size_t CacheState::valid_in_set(std::uint64_t index) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < geom_.ways; ++w) n += lines_[index * geom_.ways + w].valid ? 1 : 0;
    return n;
}

}  // namespace vivt
