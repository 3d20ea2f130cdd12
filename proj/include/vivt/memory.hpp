#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "vivt/addr.hpp"

namespace vivt {

/// Physical side of the miss path: line fetches and word write-throughs.
class MemoryPort {
public:
    virtual ~MemoryPort() = default;
    virtual void read_line(Addr line_addr, std::span<std::uint8_t> out) const = 0;
    virtual void write_word(Addr p, std::uint32_t word) = 0;
};

// Sparse physical memory, stored per line. Untouched bytes read as zero.
class PhysicalMemory final : public MemoryPort {
public:
    explicit PhysicalMemory(std::uint64_t line_size) : line_size_(line_size) {}

    void read_line(Addr line_addr, std::span<std::uint8_t> out) const override;
    void write_word(Addr p, std::uint32_t word) override;
    [[nodiscard]] std::uint32_t read_word(Addr p) const;

    /// Line bytes, or nullptr for a line never written.
    [[nodiscard]] const std::vector<std::uint8_t>* find_line(Addr line_addr) const;
    [[nodiscard]] std::uint64_t line_size() const { return line_size_; }
    [[nodiscard]] std::size_t touched_lines() const { return lines_.size(); }

    friend bool operator==(const PhysicalMemory& a, const PhysicalMemory& b) {
        return a.line_size_ == b.line_size_ && a.lines_ == b.lines_;
    }

private:
    std::uint64_t line_size_;
    std::unordered_map<Addr, std::vector<std::uint8_t>> lines_;
};

}  // namespace vivt
