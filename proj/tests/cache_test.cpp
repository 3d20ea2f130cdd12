#include <doctest.h>

#include <algorithm>
#include <list>
#include <map>
#include <random>

#include "vivt/cache.hpp"

using namespace vivt;

namespace {

std::vector<std::uint8_t> pattern_line(const Geometry& g, std::uint8_t seed) {
    std::vector<std::uint8_t> line(g.line_size);
    for (std::size_t i = 0; i < line.size(); ++i) line[i] = static_cast<std::uint8_t>(seed + i);
    return line;
}

Geometry reference_geometry(unsigned r = 0) {
    CacheConfig c;
    c.associativity_log2 = r;
    return derive_geometry(c);
}

}  // namespace

TEST_CASE("empty cache misses") {
    CacheState cache(reference_geometry());
    CHECK_FALSE(cache.hit_check_and_access(Access::Read, 0x1000).hit);
    CHECK(cache.valid_line_count() == 0);
}

TEST_CASE("fill then read hits with the line's word") {
    const Geometry g = reference_geometry();
    CacheState cache(g);
    const auto line = pattern_line(g, 0x10);
    CHECK_FALSE(cache.fill_line(0x2040, line).has_value());
    const auto r = cache.hit_check_and_access(Access::Read, 0x2048);
    CHECK(r.hit);
    CHECK(r.rdata == load_word(line, 8));
    CHECK(r.rdata == 0x1B1A1918u);
}

TEST_CASE("miss leaves state unchanged") {
    const Geometry g = reference_geometry();
    CacheState cache(g);
    cache.fill_line(0x2040, pattern_line(g, 1));
    CHECK_FALSE(cache.hit_check_and_access(Access::Write, 0x3040, 0xDEAD).hit);
    CHECK(cache.valid_line_count() == 1);
    CHECK(cache.hit_check_and_access(Access::Read, 0x2040).rdata == load_word(pattern_line(g, 1), 0));
}

TEST_CASE("direct-mapped conflict reports the displaced line") {
    const Geometry g = reference_geometry();
    CacheState cache(g);
    cache.fill_line(0x0000'1040, pattern_line(g, 1));
    const auto evicted = cache.fill_line(0x0001'1040, pattern_line(g, 2));
    REQUIRE(evicted.has_value());
    CHECK(*evicted == line_ref(0x0000'1040, g));
    CHECK(virtual_line_address(evicted->index, evicted->vtag, g) == 0x0000'1040);
}

TEST_CASE("LRU victim matches a reference recency list") {
    for (unsigned r = 1; r <= 2; ++r) {
        const Geometry g = reference_geometry(r);
        CacheState cache(g);
        // Reference: per-set recency list, front = most recent.
        std::map<std::uint64_t, std::list<std::uint64_t>> ref;
        std::mt19937_64 rng(42 + r);
        const std::uint64_t set_span = g.num_sets << g.line_bits;
        for (int step = 0; step < 20000; ++step) {
            const std::uint64_t set = rng() % 4;
            const std::uint64_t tag = rng() % 7;
            const Addr v = tag * set_span + (set << g.line_bits);
            auto& lru = ref[set];
            if (cache.hit_check_and_access(Access::Read, v).hit) {
                REQUIRE(std::find(lru.begin(), lru.end(), tag) != lru.end());
                lru.remove(tag);
                lru.push_front(tag);
                continue;
            }
            REQUIRE(std::find(lru.begin(), lru.end(), tag) == lru.end());
            const auto evicted = cache.fill_line(v, pattern_line(g, 0));
            if (lru.size() == g.ways) {
                REQUIRE(evicted.has_value());
                CHECK(evicted->vtag == vivt_tag(lru.back() * set_span, g));
                lru.pop_back();
            } else {
                CHECK_FALSE(evicted.has_value());
            }
            lru.push_front(tag);
        }
    }
}

TEST_CASE("four fills then a fifth evict the least recently used") {
    const Geometry g = reference_geometry(2);
    CacheState cache(g);
    const std::uint64_t span = g.num_sets << g.line_bits;
    for (Addr t = 0; t < 4; ++t) cache.fill_line(t * span, pattern_line(g, 0));
    cache.hit_check_and_access(Access::Read, 0 * span);  // way holding tag 0 becomes MRU
    const auto evicted = cache.fill_line(4 * span, pattern_line(g, 0));
    REQUIRE(evicted.has_value());
    CHECK(*evicted == line_ref(1 * span, g));
}

TEST_CASE("invalidate_virtual_line is idempotent") {
    const Geometry g = reference_geometry();
    CacheState cache(g);
    CHECK_FALSE(cache.invalidate_virtual_line(line_ref(0x4000, g)));
    cache.fill_line(0x4000, pattern_line(g, 3));
    CHECK(cache.invalidate_virtual_line(line_ref(0x4000, g)));
    CHECK_FALSE(cache.hit_check_and_access(Access::Read, 0x4000).hit);
    CHECK_FALSE(cache.invalidate_virtual_line(line_ref(0x4000, g)));
}

TEST_CASE("invalidate with a mismatched vtag is a no-op") {
    const Geometry g = reference_geometry();
    CacheState cache(g);
    cache.fill_line(0x0001'4000, pattern_line(g, 3));
    CHECK_FALSE(cache.invalidate_virtual_line(line_ref(0x0000'4000, g)));
    CHECK(cache.contains(0x0001'4000));
    CHECK(cache.invalidate_virtual_line(vivt_index(0x4000, g), std::nullopt));
    CHECK_FALSE(cache.contains(0x0001'4000));
}

TEST_CASE("flush_all") {
    const Geometry g = reference_geometry(1);
    CacheState cache(g);
    cache.flush_all();
    CHECK(cache.valid_line_count() == 0);
    for (Addr v = 0; v < 64 * g.line_size; v += g.line_size) cache.fill_line(v, pattern_line(g, 0));
    CHECK(cache.valid_line_count() == 64);
    cache.flush_all();
    CHECK(cache.valid_line_count() == 0);
    cache.flush_all();
    CHECK(cache.valid_line_count() == 0);
}

TEST_CASE("read-your-writes against a flat memory replay") {
    // Oracle: flat virtual word memory; the cache allocates on every miss from that memory
    // (write-through keeps it current), so every hit must agree with it.
    for (unsigned r = 0; r <= 2; ++r) {
        const Geometry g = reference_geometry(r);
        CacheState cache(g);
        std::map<Addr, std::uint32_t> flat;
        std::mt19937_64 rng(7 + r);
        auto line_image = [&](Addr v) {
            std::vector<std::uint8_t> line(g.line_size);
            const Addr base = line_address(v, g);
            for (std::size_t off = 0; off < g.line_size; off += 4) {
                auto it = flat.find(base + off);
                store_word(line, off, it == flat.end() ? 0 : it->second);
            }
            return line;
        };
        for (int step = 0; step < 50000; ++step) {
            const Addr v = ((rng() % 4096) * 4) | ((rng() % 8) << 16);
            const bool write = rng() % 3 == 0;
            const auto word = static_cast<std::uint32_t>(rng());
            const auto res = cache.hit_check_and_access(write ? Access::Write : Access::Read, v, word);
            if (write) flat[v] = word;
            if (res.hit) {
                CHECK(res.rdata == flat[v]);
            } else {
                cache.fill_line(v, line_image(v));
                CHECK(cache.hit_check_and_access(Access::Read, v).rdata == flat[v]);
            }
            CHECK(cache.valid_in_set(vivt_index(v, g)) <= g.ways);
        }
        CHECK(cache.valid_line_count() <= g.num_sets * g.ways);
    }
}
