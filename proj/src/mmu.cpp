#include "vivt/mmu.hpp"

#include <algorithm>
#include <sstream>

#include "vivt/text.hpp"

namespace vivt {

namespace {

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << "0x" << std::hex << v;
    return os.str();
}

}  // namespace

TranslationFault::TranslationFault(ContextId ctx, Addr v)
    : std::runtime_error("translation fault: ctx " + std::to_string(ctx) + " vaddr " + hex(v)), ctx_(ctx), v_(v) {}

void PageTable::map(ContextId ctx, std::uint64_t vpn, std::uint64_t ppn) {
    if (!map_.try_emplace(Key{ctx, vpn}, ppn).second)
        throw std::invalid_argument("duplicate mapping for ctx " + std::to_string(ctx) + " vpn " + hex(vpn));
}

std::optional<std::uint64_t> PageTable::lookup(ContextId ctx, std::uint64_t vpn) const {
    if (auto it = map_.find(Key{ctx, vpn}); it != map_.end()) return it->second;
    if (identity_) return vpn;
    return std::nullopt;
}

void PageTable::validate(const Geometry& g) const {
    const std::uint64_t vpn_limit = mask_bits(g.va_width - g.page_bits);
    const std::uint64_t ppn_limit = mask_bits(g.pa_width - g.page_bits);
    for (const auto& [key, ppn] : map_) {
        if (key.vpn > vpn_limit) throw ConfigError("page_table", "vpn " + hex(key.vpn) + " exceeds va_width");
        if (ppn > ppn_limit) throw ConfigError("page_table", "ppn " + hex(ppn) + " exceeds pa_width");
    }
}

std::string PageTable::to_text() const {
    std::vector<std::pair<Key, std::uint64_t>> rows(map_.begin(), map_.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::pair(a.first.ctx, a.first.vpn) < std::pair(b.first.ctx, b.first.vpn);
    });
    std::ostringstream os;
    os << "identity " << (identity_ ? "on" : "off") << '\n';
    for (const auto& [key, ppn] : rows) os << key.ctx << ' ' << hex(key.vpn) << ' ' << hex(ppn) << '\n';
    return os.str();
}

std::optional<Addr> try_translate(ContextId ctx, Addr v, const PageTable& pt, const Geometry& g) {
    v = mask_va(v, g);
    const auto ppn = pt.lookup(ctx, page_number(v, g));
    if (!ppn) return std::nullopt;
    return mask_pa((*ppn << g.page_bits) | intra_page_offset(v, g), g);
}

Addr translate(ContextId ctx, Addr v, const PageTable& pt, const Geometry& g) {
    if (auto p = try_translate(ctx, v, pt, g)) return *p;
    throw TranslationFault(ctx, v);
}

PageTable load_page_table(std::string_view input, bool default_identity) {
    PageTable pt(default_identity);
    bool seen_mapping = false;
    text::for_each_line(input, [&](std::size_t n, std::string_view raw) {
        const auto line = text::strip_comment(raw);
        if (line.empty()) return;
        const auto fields = text::split_ws(line);
        if (fields[0] == "identity") {
            if (seen_mapping) throw ParseError(n, "identity header must precede mappings");
            if (fields.size() != 2 || (fields[1] != "on" && fields[1] != "off"))
                throw ParseError(n, "expected 'identity on' or 'identity off'");
            pt.set_default_identity(fields[1] == "on");
            return;
        }
        if (fields.size() != 3) throw ParseError(n, "expected '<ctx> <vpn-hex> <ppn-hex>'");
        const auto ctx = text::parse_uint(fields[0], 10);
        const auto vpn = text::parse_uint(fields[1], 16);
        const auto ppn = text::parse_uint(fields[2], 16);
        if (!ctx || *ctx > 0xFFFFFFFFu) throw ParseError(n, "bad context id '" + std::string(fields[0]) + "'");
        if (!vpn) throw ParseError(n, "bad vpn '" + std::string(fields[1]) + "'");
        if (!ppn) throw ParseError(n, "bad ppn '" + std::string(fields[2]) + "'");
        try {
            pt.map(static_cast<ContextId>(*ctx), *vpn, *ppn);
        } catch (const std::invalid_argument& e) {
            throw ParseError(n, e.what());
        }
        seen_mapping = true;
    });
    return pt;
}

MissResult handle_miss(Access rw, ContextId ctx, Addr v, std::uint32_t wdata, const PageTable& pt, Rlut& rlut,
                       CacheState& cache, MemoryPort& memory, const Latencies& lat, const MissObserver& observer) {
    const Geometry& g = cache.geometry();
    MissResult result;
    result.p = translate(ctx, v, pt, g);

    InvalidationPlan plan = rlut.lookup_and_insert(result.p, v);
    if (observer) observer(MissPhase::AwaitInvalidate);

    auto issue = [&](const VirtualLineRef& ref, unsigned& cleared) {
        result.invalidations_issued.push_back(ref);
        if (cache.invalidate_virtual_line(ref)) {
            ++cleared;
        } else {
            ++result.stale_noops;
        }
    };
    if (plan.evict) issue(*plan.evict, result.synonym_invalidations);
    if (rw == Access::Write) {
        for (const auto& ref : plan.others) issue(ref, result.synonym_invalidations);
    }
    for (const auto& ref : plan.displaced) issue(ref, result.displacement_invalidations);
    if (observer) observer(MissPhase::AwaitLine);

    if (rw == Access::Write) memory.write_word(result.p & ~Addr{3}, wdata);

    result.line.resize(g.line_size);
    memory.read_line(line_address(result.p, g), result.line);
    if (observer) observer(MissPhase::LineArrived);

    cache.fill_line(v, result.line);
    result.cycles = lat.translate + std::max<std::uint64_t>(lat.fetch, kRlutInsertCycles);
    return result;
}

}  // namespace vivt
