#include "vivt/addr.hpp"

namespace vivt {

namespace {

void require_pow2(const char* field, std::uint64_t value) {
    if (!is_pow2(value)) throw ConfigError(field, "must be a power of two, got " + std::to_string(value));
}

}  // namespace

void validate(const CacheConfig& c) {
    require_pow2("cache_size", c.cache_size);
    require_pow2("line_size", c.line_size);
    require_pow2("page_size", c.page_size);
    if (c.line_size < 4) throw ConfigError("line_size", "must hold at least one 4-byte word");
    if (c.line_size > c.page_size) throw ConfigError("line_size", "must not exceed page_size");
    if (c.page_size > c.cache_size) throw ConfigError("page_size", "must not exceed cache_size");
    if (c.va_width == 0 || c.va_width > 64) throw ConfigError("va_width", "must be in [1, 64]");
    if (c.pa_width == 0 || c.pa_width > 64) throw ConfigError("pa_width", "must be in [1, 64]");
    if (c.va_width > c.pa_width) throw ConfigError("va_width", "must not exceed pa_width");
    if (c.associativity_log2 >= 63 || c.ways() > c.num_lines())
        throw ConfigError("assoc_log2", "2^r exceeds the number of cache lines");
    if (c.synonym_limit == 0) throw ConfigError("synonym_limit", "must be at least 1");
    if (log2_exact(c.cache_size / c.ways()) > c.va_width)
        throw ConfigError("va_width", "too narrow for the cache set index");
    if (log2_exact(c.page_size) > c.va_width) throw ConfigError("page_size", "wider than va_width");
}

Geometry derive_geometry(const CacheConfig& c) {
    validate(c);
    Geometry g;
    g.line_bits = log2_exact(c.line_size);
    g.page_bits = log2_exact(c.page_size);
    g.assoc_log2 = c.associativity_log2;
    g.ways = c.ways();
    g.num_sets = c.num_lines() / g.ways;
    const unsigned set_bits = log2_exact(g.num_sets);

    g.set_index_low = g.line_bits;
    g.set_index_high = g.line_bits + set_bits - 1;  // empty when set_bits == 0
    g.vtag_low = g.line_bits + set_bits;
    g.vtag_high = c.va_width - 1;
    g.rlut_index_low = g.line_bits;
    g.rlut_index_high = g.page_bits - 1;
    g.rlut_tag_low = g.page_bits;
    g.rlut_tag_high = c.pa_width - 1;

    g.k = g.vtag_low > g.page_bits ? g.vtag_low - g.page_bits : 0;
    g.rlut_ways = std::uint64_t{1} << g.k;
    g.rlut_sets = c.page_size / c.line_size;
    g.synonym_problem = g.k > 0;

    g.va_width = c.va_width;
    g.pa_width = c.pa_width;
    g.line_size = c.line_size;
    g.page_size = c.page_size;
    g.synonym_limit = c.synonym_limit;
    return g;
}

}  // namespace vivt
