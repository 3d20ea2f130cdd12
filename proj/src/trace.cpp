#include "vivt/trace.hpp"

#include <fmt/format.h>

#include "vivt/text.hpp"

namespace vivt {

namespace {

struct FieldReader {
    std::size_t line;
    const std::vector<std::string_view>& fields;

    std::uint64_t number(std::size_t i, int base, const char* what) const {
        auto v = text::parse_uint(fields[i], base);
        if (!v) throw ParseError(line, fmt::format("bad {} '{}'", what, fields[i]));
        return *v;
    }
    unsigned core(std::size_t i, std::optional<unsigned> core_count) const {
        const auto c = number(i, 10, "core");
        if (c > 0xFFFF || (core_count && c >= *core_count))
            throw ParseError(line, fmt::format("core {} out of range", c));
        return static_cast<unsigned>(c);
    }
    ContextId ctx(std::size_t i) const {
        const auto c = number(i, 10, "context id");
        if (c > 0xFFFFFFFFu) throw ParseError(line, "context id out of range");
        return static_cast<ContextId>(c);
    }
    Addr word_address(std::size_t i) const {
        const auto a = number(i, 16, "address");
        if (a % 4 != 0) throw ParseError(line, fmt::format("address {:#x} is not word-aligned", a));
        return a;
    }
};

}  // namespace

std::vector<TraceEvent> parse_trace(std::string_view input, std::optional<unsigned> core_count) {
    std::vector<TraceEvent> events;
    text::for_each_line(input, [&](std::size_t n, std::string_view raw) {
        const auto line = text::strip_comment(raw);
        if (line.empty()) return;
        const auto fields = text::split_ws(line);
        const FieldReader r{n, fields};
        const std::string_view op = fields[0];
        auto arity = [&](std::size_t want) {
            if (fields.size() != want) throw ParseError(n, fmt::format("'{}' takes {} operands", op, want - 1));
        };
        if (op == "R") {
            arity(4);
            events.emplace_back(ReadEvent{r.core(1, core_count), r.ctx(2), r.word_address(3)});
        } else if (op == "W") {
            arity(5);
            const auto data = r.number(4, 16, "data word");
            if (data > 0xFFFFFFFFu) throw ParseError(n, "data word wider than 32 bits");
            events.emplace_back(
                WriteEvent{r.core(1, core_count), r.ctx(2), r.word_address(3), static_cast<std::uint32_t>(data)});
        } else if (op == "X") {
            arity(3);
            events.emplace_back(ContextSwitchEvent{r.core(1, core_count), r.ctx(2)});
        } else if (op == "I") {
            arity(2);
            events.emplace_back(ExternalInvalidateEvent{r.number(1, 16, "address")});
        } else {
            throw ParseError(n, fmt::format("unknown event '{}'", op));
        }
    });
    return events;
}

std::string format_event(const TraceEvent& e) {
    struct Visitor {
        std::string operator()(const ReadEvent& r) const { return fmt::format("R {} {} {:#x}", r.core, r.ctx, r.vaddr); }
        std::string operator()(const WriteEvent& w) const {
            return fmt::format("W {} {} {:#x} {:#x}", w.core, w.ctx, w.vaddr, w.data);
        }
        std::string operator()(const ContextSwitchEvent& x) const { return fmt::format("X {} {}", x.core, x.new_ctx); }
        std::string operator()(const ExternalInvalidateEvent& i) const { return fmt::format("I {:#x}", i.paddr); }
    };
    return std::visit(Visitor{}, e);
}

std::string format_trace(const std::vector<TraceEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += format_event(e);
        out += '\n';
    }
    return out;
}

}  // namespace vivt
