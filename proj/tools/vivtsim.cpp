// vivtsim: trace-driven simulator for synonym-safe VIVT caches with reverse lookup tables.
//
//   vivtsim run --config F --trace F [--page-table F] [--check] [--csv]
//   vivtsim check --config F --trace F [--page-table F]
//   vivtsim gen-trace --seed N --events N --cores N --synonym-groups N
//                     --write-ratio X --ctx-switch-ratio X -o DIR [--config F]
//   vivtsim rlut-size [--s N]
//
// Exit codes: 0 success, 1 invariant or oracle violation, 2 usage or parse error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vivt/rlut.hpp"
#include "vivt/sim.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << contents)) throw UsageError("cannot write " + path.string());
}

vivt::SystemConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    try {
        return vivt::parse_config(read_file(path));
    } catch (const vivt::ParseError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

// The page table comes from --page-table, else pagetable.txt beside the trace, else identity.
vivt::PageTable load_page_table_for(const std::string& trace_path, const std::string& explicit_path) {
    fs::path path = explicit_path;
    if (path.empty()) {
        const fs::path sibling = fs::path(trace_path).parent_path() / "pagetable.txt";
        if (!fs::exists(sibling)) return vivt::PageTable(true);
        path = sibling;
    }
    try {
        return vivt::load_page_table(read_file(path));
    } catch (const vivt::ParseError& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

struct RunArgs {
    std::string config;
    std::string trace;
    std::string page_table;
    bool check = false;
    bool csv = false;
};

int run(const RunArgs& args) {
    const auto config = load_config(args.config);
    const auto pt = load_page_table_for(args.trace, args.page_table);
    std::vector<vivt::TraceEvent> events;
    try {
        events = vivt::parse_trace(read_file(args.trace), config.cores);
    } catch (const vivt::ParseError& e) {
        throw UsageError(args.trace + ": " + e.what());
    }

    vivt::RunOutcome outcome;
    try {
        outcome = vivt::run_trace(events, config, pt, {.check_mode = args.check});
    } catch (const vivt::CheckFailure& failure) {
        std::cerr << "violation at " << failure.what() << '\n';
        for (const auto& v : failure.violations())
            std::cerr << fmt::format("  core {} [{}] {}\n", v.core, vivt::to_string(v.kind), v.message);
        return kExitViolation;
    }

    std::cout << (args.csv ? vivt::stats_csv(outcome.stats) : vivt::stats_text(outcome.stats));
    for (const auto& v : outcome.violations)
        std::cerr << fmt::format("violation: core {} [{}] {}\n", v.core, vivt::to_string(v.kind), v.message);
    if (outcome.stats.oracle_mismatches > 0)
        std::cerr << outcome.stats.oracle_mismatches << " reads disagreed with the flat-memory oracle\n";
    return outcome.ok() ? 0 : kExitViolation;
}

struct GenArgs {
    vivt::GenParams params;
    std::string out_dir;
    std::string config;
};

int gen_trace(GenArgs args) {
    auto config = load_config(args.config);
    config.cores = args.params.cores;
    const auto bundle = vivt::generate_trace(args.params, vivt::derive_geometry(config.cache));
    fs::create_directories(args.out_dir);
    const fs::path dir = args.out_dir;
    write_file(dir / "trace.txt", vivt::format_trace(bundle.events));
    write_file(dir / "pagetable.txt", bundle.page_table.to_text());
    write_file(dir / "config.txt", vivt::format_config(config));
    std::cout << fmt::format("wrote {} events to {}\n", bundle.events.size(), (dir / "trace.txt").string());
    return 0;
}

int rlut_size(std::optional<unsigned> s) {
    std::vector<unsigned> limits = s ? std::vector<unsigned>{*s} : std::vector<unsigned>{1, 2};
    std::cout << "-----------------------------------------\n"
              << "  Cache-size      S        Bytes-needed\n"
              << "-----------------------------------------\n";
    for (unsigned synonyms : limits) {
        for (std::uint64_t kb : {4, 8, 16, 32}) {
            std::cout << fmt::format("  {:>4}KB       {:>3}        {:>8}\n", kb, synonyms,
                                     vivt::bytes_needed(kb * 1024, synonyms));
        }
    }
    std::cout << "-----------------------------------------\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synonym-safe VIVT cache simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Replay a trace and print statistics");
    run_cmd->add_option("--config", run_args.config, "Configuration file")->check(CLI::ExistingFile);
    run_cmd->add_option("--trace", run_args.trace, "Trace file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--page-table", run_args.page_table, "Page-table file")->check(CLI::ExistingFile);
    run_cmd->add_flag("--check", run_args.check, "Check invariants and the oracle after every event");
    run_cmd->add_flag("--csv", run_args.csv, "Print statistics as CSV");

    RunArgs check_args;
    check_args.check = true;
    auto* check_cmd = app.add_subcommand("check", "Replay a trace checking invariants after every event");
    check_cmd->add_option("--config", check_args.config, "Configuration file")->check(CLI::ExistingFile);
    check_cmd->add_option("--trace", check_args.trace, "Trace file")->required()->check(CLI::ExistingFile);
    check_cmd->add_option("--page-table", check_args.page_table, "Page-table file")->check(CLI::ExistingFile);
    check_cmd->add_flag("--csv", check_args.csv, "Print statistics as CSV");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-trace", "Generate a random trace bundle");
    gen_cmd->add_option("--seed", gen.params.seed, "RNG seed");
    gen_cmd->add_option("--events", gen.params.events, "Number of events");
    gen_cmd->add_option("--cores", gen.params.cores, "Core count")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--synonym-groups", gen.params.synonym_groups, "Physical pages shared by synonym groups");
    gen_cmd->add_option("--write-ratio", gen.params.write_ratio, "Fraction of writes")->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--ctx-switch-ratio", gen.params.context_switch_ratio, "Fraction of context switches")
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("-o,--out", gen.out_dir, "Output directory")->required();
    gen_cmd->add_option("--config", gen.config, "Configuration file for the geometry")->check(CLI::ExistingFile);

    std::optional<unsigned> s_filter;
    auto* size_cmd = app.add_subcommand("rlut-size", "Print RLUT storage per cache size and S");
    size_cmd->add_option("--s", s_filter, "Only this synonym limit")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run_cmd) return run(run_args);
        if (*check_cmd) return run(check_args);
        if (*gen_cmd) return gen_trace(gen);
        if (*size_cmd) return rlut_size(s_filter);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const vivt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
