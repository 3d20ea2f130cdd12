#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vivt/addr.hpp"
#include "vivt/coherence.hpp"

namespace vivt {

// Reference model: a flat word-addressed physical memory with no caches.
// Untouched words read as zero.
class FlatMemoryOracle {
public:
    [[nodiscard]] std::uint32_t oracle_read(Addr p) const {
        auto it = words_.find(p & ~Addr{3});
        return it == words_.end() ? 0 : it->second;
    }
    void oracle_write(Addr p, std::uint32_t data) { words_[p & ~Addr{3}] = data; }

private:
    std::unordered_map<Addr, std::uint32_t> words_;
};

struct Violation {
    enum class Kind {
        SynonymBound,     // (a) more than S resident lines translate to one physical line
        LinesPerOffset,   // (b) more distinct physical lines share an in-page line offset than RLUT ways
        StaleData,        // (c) resident bytes differ from memory with no invalidation queued
        RlutStructure,    // (d) duplicate tag in a set or duplicate synonym in an entry
        RlutCoverage,     // (d) a resident line the RLUT cannot find
        Untranslatable,   // a resident line whose page no longer translates
    };
    Kind kind;
    std::size_t core;
    Addr addr;  // physical line address, or virtual line address for Untranslatable
    std::string message;
};

[[nodiscard]] const char* to_string(Violation::Kind kind);

struct CheckOptions {
    bool data = true;  // include check (c)
    std::optional<std::size_t> only_core;
};

/// Verifies the per-core invariants against the system's page table.
[[nodiscard]] std::vector<Violation> check_invariants(const MemorySystem& system, const CheckOptions& options = {});

}  // namespace vivt
