#include "vivt/rlut.hpp"

#include <algorithm>

namespace vivt {

Rlut::Rlut(const Geometry& g) : geom_(g), entries_(g.rlut_sets * g.rlut_ways), way_replace_ptr_(g.rlut_sets, 0) {
    for (Entry& e : entries_) e.slots.resize(g.synonym_limit);
}

VirtualLineRef Rlut::reconstruct(Addr p, std::uint64_t vpage) const {
    const Addr v = (vpage << geom_.page_bits) | (intra_page_offset(p, geom_) & ~(geom_.line_size - 1));
    return line_ref(v, geom_);
}

Addr Rlut::entry_line_address(std::uint64_t set, std::uint64_t way) const {
    return (entry(set, way).ptag << geom_.rlut_tag_low) | (set << geom_.rlut_index_low);
}

std::vector<VirtualLineRef> Rlut::refs_of(const Entry& e, Addr p, std::optional<std::size_t> skip) const {
    std::vector<VirtualLineRef> out;
    for (std::size_t i = 0; i < e.slots.size(); ++i) {
        if (e.slots[i].valid && i != skip) out.push_back(reconstruct(p, e.slots[i].vpage));
    }
    return out;
}

std::vector<VirtualLineRef> Rlut::lookup(Addr p) const {
    p = mask_pa(p, geom_);
    const std::uint64_t set = rlut_index(p, geom_);
    const std::uint64_t tag = rlut_tag(p, geom_);
    for (std::uint64_t w = 0; w < geom_.rlut_ways; ++w) {
        const Entry& e = entry(set, w);
        if (e.valid && e.ptag == tag) return refs_of(e, p, std::nullopt);
    }
    return {};
}

bool Rlut::records(Addr p, Addr v) const {
    p = mask_pa(p, geom_);
    const std::uint64_t set = rlut_index(p, geom_);
    const std::uint64_t tag = rlut_tag(p, geom_);
    const std::uint64_t vpage = page_number(mask_va(v, geom_), geom_);
    for (std::uint64_t w = 0; w < geom_.rlut_ways; ++w) {
        const Entry& e = entry(set, w);
        if (!e.valid || e.ptag != tag) continue;
        return std::any_of(e.slots.begin(), e.slots.end(), [&](const Slot& s) { return s.valid && s.vpage == vpage; });
    }
    return false;
}

InvalidationPlan Rlut::lookup_and_insert(Addr p, Addr v) {
    p = mask_pa(p, geom_);
    const std::uint64_t set = rlut_index(p, geom_);
    const std::uint64_t tag = rlut_tag(p, geom_);
    const std::uint64_t vpage = page_number(mask_va(v, geom_), geom_);
    auto set_begin = entries_.begin() + static_cast<std::ptrdiff_t>(set * geom_.rlut_ways);
    auto set_end = set_begin + static_cast<std::ptrdiff_t>(geom_.rlut_ways);

    InvalidationPlan plan;
    auto hit = std::find_if(set_begin, set_end, [&](const Entry& e) { return e.valid && e.ptag == tag; });
    if (hit != set_end) {
        Entry& e = *hit;
        auto& slots = e.slots;
        auto same = std::find_if(slots.begin(), slots.end(), [&](const Slot& s) { return s.valid && s.vpage == vpage; });
        if (same != slots.end()) {
            plan.others = refs_of(e, p, static_cast<std::size_t>(same - slots.begin()));
            return plan;
        }
        auto free = std::find_if(slots.begin(), slots.end(), [](const Slot& s) { return !s.valid; });
        if (free != slots.end()) {
            plan.others = refs_of(e, p, std::nullopt);
            *free = Slot{true, vpage};
            return plan;
        }
        const std::size_t victim = e.replace_ptr;
        e.replace_ptr = static_cast<std::uint32_t>((victim + 1) % slots.size());
        plan.evict = reconstruct(p, slots[victim].vpage);
        plan.others = refs_of(e, p, victim);
        slots[victim] = Slot{true, vpage};
        return plan;
    }

    auto way = std::find_if(set_begin, set_end, [](const Entry& e) { return !e.valid; });
    if (way == set_end) {
        std::uint32_t& ptr = way_replace_ptr_[set];
        way = set_begin + ptr;
        ptr = static_cast<std::uint32_t>((ptr + 1) % geom_.rlut_ways);
        const auto w = static_cast<std::uint64_t>(way - set_begin);
        plan.displaced = refs_of(*way, entry_line_address(set, w), std::nullopt);
    }
    way->valid = true;
    way->ptag = tag;
    way->replace_ptr = 0;
    std::fill(way->slots.begin(), way->slots.end(), Slot{});
    way->slots[0] = Slot{true, vpage};
    return plan;
}

void Rlut::clear() {
    for (Entry& e : entries_) {
        e.valid = false;
        e.replace_ptr = 0;
        std::fill(e.slots.begin(), e.slots.end(), Slot{});
    }
    std::fill(way_replace_ptr_.begin(), way_replace_ptr_.end(), 0);
}

std::uint64_t bytes_needed(std::uint64_t cache_size, unsigned s) {
    if (cache_size <= 4 * 1024) return 0;
    return ((cache_size / 64) * (24 + 3 * std::uint64_t{s})) / 8;
}

}  // namespace vivt
