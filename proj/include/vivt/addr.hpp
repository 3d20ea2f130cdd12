#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vivt {

using Addr = std::uint64_t;

/// Raised when a cache configuration is rejected. `field()` names the key at fault.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct CacheConfig {
    std::uint64_t cache_size = 32 * 1024;
    std::uint64_t line_size = 64;
    unsigned associativity_log2 = 0;
    std::uint64_t page_size = 4 * 1024;
    unsigned va_width = 32;
    unsigned pa_width = 36;
    unsigned synonym_limit = 1;

    [[nodiscard]] std::uint64_t ways() const { return std::uint64_t{1} << associativity_log2; }
    [[nodiscard]] std::uint64_t num_lines() const { return cache_size / line_size; }

    friend bool operator==(const CacheConfig&, const CacheConfig&) = default;
};

// Bit positions are inclusive [high:low]. A range with high < low is empty.
struct Geometry {
    unsigned line_bits = 0;
    unsigned page_bits = 0;
    unsigned set_index_low = 0;
    unsigned set_index_high = 0;
    unsigned vtag_low = 0;
    unsigned vtag_high = 0;
    unsigned rlut_index_low = 0;
    unsigned rlut_index_high = 0;
    unsigned rlut_tag_low = 0;
    unsigned rlut_tag_high = 0;
    unsigned k = 0;  // synonym index width
    unsigned assoc_log2 = 0;
    unsigned va_width = 0;
    unsigned pa_width = 0;
    std::uint64_t num_sets = 0;
    std::uint64_t ways = 0;
    std::uint64_t rlut_ways = 0;
    std::uint64_t rlut_sets = 0;
    std::uint64_t line_size = 0;
    std::uint64_t page_size = 0;
    unsigned synonym_limit = 1;
    bool synonym_problem = false;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Defaults: 32 KB direct-mapped, 64 B lines, 4 KB pages, VA 32, PA 36, S = 1.
[[nodiscard]] constexpr CacheConfig default_config() { return CacheConfig{}; }

[[nodiscard]] constexpr bool is_pow2(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

[[nodiscard]] constexpr unsigned log2_exact(std::uint64_t x) {
    unsigned n = 0;
    while (x > 1) {
        x >>= 1;
        ++n;
    }
    return n;
}

[[nodiscard]] constexpr std::uint64_t mask_bits(unsigned width) {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

/// Extracts bits [high:low] of `value`; returns 0 for an empty range.
[[nodiscard]] constexpr std::uint64_t bit_field(std::uint64_t value, unsigned high, unsigned low) {
    if (high < low) return 0;
    return (value >> low) & mask_bits(high - low + 1);
}

void validate(const CacheConfig& config);
[[nodiscard]] Geometry derive_geometry(const CacheConfig& config);

[[nodiscard]] inline Addr mask_va(Addr v, const Geometry& g) { return v & mask_bits(g.va_width); }
[[nodiscard]] inline Addr mask_pa(Addr p, const Geometry& g) { return p & mask_bits(g.pa_width); }

[[nodiscard]] inline std::uint64_t vivt_index(Addr v, const Geometry& g) {
    return bit_field(v, g.set_index_high, g.set_index_low);
}

[[nodiscard]] inline std::uint64_t vivt_tag(Addr v, const Geometry& g) {
    return bit_field(v, g.vtag_high, g.vtag_low);
}

[[nodiscard]] inline std::uint64_t rlut_index(Addr p, const Geometry& g) {
    return bit_field(p, g.rlut_index_high, g.rlut_index_low);
}

[[nodiscard]] inline std::uint64_t rlut_tag(Addr p, const Geometry& g) {
    return bit_field(p, g.rlut_tag_high, g.rlut_tag_low);
}

[[nodiscard]] inline Addr intra_page_offset(Addr a, const Geometry& g) { return a & (g.page_size - 1); }
[[nodiscard]] inline Addr page_number(Addr a, const Geometry& g) { return a >> g.page_bits; }
[[nodiscard]] inline Addr line_address(Addr a, const Geometry& g) { return a & ~(g.line_size - 1); }

/// Rebuilds a line-aligned virtual address from a cache position.
[[nodiscard]] inline Addr virtual_line_address(std::uint64_t index, std::uint64_t vtag, const Geometry& g) {
    return (vtag << g.vtag_low) | (index << g.set_index_low);
}

}  // namespace vivt
