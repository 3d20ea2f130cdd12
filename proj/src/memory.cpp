#include "vivt/memory.hpp"

#include <algorithm>

#include "vivt/cache.hpp"

namespace vivt {

void PhysicalMemory::read_line(Addr line_addr, std::span<std::uint8_t> out) const {
    if (const auto* line = find_line(line_addr)) {
        std::copy(line->begin(), line->end(), out.begin());
    } else {
        std::fill(out.begin(), out.end(), std::uint8_t{0});
    }
}

void PhysicalMemory::write_word(Addr p, std::uint32_t word) {
    const Addr base = p & ~(line_size_ - 1);
    auto [it, inserted] = lines_.try_emplace(base);
    if (inserted) it->second.assign(line_size_, 0);
    store_word(it->second, (p - base) & ~Addr{3}, word);
}

std::uint32_t PhysicalMemory::read_word(Addr p) const {
    const Addr base = p & ~(line_size_ - 1);
    const auto* line = find_line(base);
    return line ? load_word(*line, (p - base) & ~Addr{3}) : 0;
}

const std::vector<std::uint8_t>* PhysicalMemory::find_line(Addr line_addr) const {
    auto it = lines_.find(line_addr);
    return it == lines_.end() ? nullptr : &it->second;
}

}  // namespace vivt
