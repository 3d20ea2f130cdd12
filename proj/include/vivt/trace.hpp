#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vivt/addr.hpp"
#include "vivt/mmu.hpp"

namespace vivt {

struct ReadEvent {
    unsigned core = 0;
    ContextId ctx = 0;
    Addr vaddr = 0;
    friend bool operator==(const ReadEvent&, const ReadEvent&) = default;
};

struct WriteEvent {
    unsigned core = 0;
    ContextId ctx = 0;
    Addr vaddr = 0;
    std::uint32_t data = 0;
    friend bool operator==(const WriteEvent&, const WriteEvent&) = default;
};

struct ContextSwitchEvent {
    unsigned core = 0;
    ContextId new_ctx = 0;
    friend bool operator==(const ContextSwitchEvent&, const ContextSwitchEvent&) = default;
};

struct ExternalInvalidateEvent {
    Addr paddr = 0;
    friend bool operator==(const ExternalInvalidateEvent&, const ExternalInvalidateEvent&) = default;
};

using TraceEvent = std::variant<ReadEvent, WriteEvent, ContextSwitchEvent, ExternalInvalidateEvent>;

/// Parses `R core ctx vaddr`, `W core ctx vaddr word`, `X core ctx`, `I paddr`
/// (addresses and words in hex). When `core_count` is given, core indices are checked.
/// Throws ParseError naming the offending line.
[[nodiscard]] std::vector<TraceEvent> parse_trace(std::string_view text, std::optional<unsigned> core_count = {});

[[nodiscard]] std::string format_event(const TraceEvent& e);
[[nodiscard]] std::string format_trace(const std::vector<TraceEvent>& events);

}  // namespace vivt
