#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opn/arith.hpp"

namespace opn {

// Phi_l(x) = p^m q. A prime Phi_l(x) is stored with m = 0 and p = q.
struct SolutionRecord {
    unsigned l = 0;
    std::uint64_t x = 0;
    Int p;
    unsigned long m = 0;
    Int q;
    bool certified = false;  // every prime involved is proven, not just probable
    std::string ts;

    bool operator==(const SolutionRecord&) const = default;
};

bool record_less(const SolutionRecord& a, const SolutionRecord& b);  // by (l, x, p, m)

std::vector<std::string> record_errors(const SolutionRecord& r);
std::string record_to_json(const SolutionRecord& r);  // one line, no newline
// Parses and re-verifies; DomainError on malformed or false records.
SolutionRecord record_from_json(const std::string& line);
std::vector<SolutionRecord> load_records(const std::filesystem::path& file);

enum class XOutcome { not_candidate, no_record, records, skipped };

struct XAnalysis {
    XOutcome outcome = XOutcome::not_candidate;
    std::vector<SolutionRecord> records;
    std::string reason;
    std::vector<Int> unfactored;
};

// Candidates are primes x != 1 (mod l). Rejects as soon as the partial factorization
// rules out the shape p^m q; skips when the budget leaves it undecided.
XAnalysis analyze_x(unsigned l, std::uint64_t x, const FactorBudget& budget, const std::string& ts);

struct SearchCheckpoint {
    unsigned l = 0;
    std::uint64_t lo = 0, hi = 0;  // this shard's subrange
    std::uint64_t last_done = 0;   // every x <= last_done is processed; lo - 1 when none
    unsigned shard = 0;
    std::string ts;
    bool operator==(const SearchCheckpoint&) const = default;
};

std::string checkpoint_to_json(const SearchCheckpoint& c);
SearchCheckpoint checkpoint_from_json(const std::string& text);

struct SearchOptions {
    unsigned l = 0;
    std::uint64_t lo = 2, hi = 2;
    unsigned shards = 1;
    FactorBudget budget{1 << 16, 4'000'000};
    std::filesystem::path out;
    bool resume = false;
    std::optional<std::uint64_t> interrupt_after;  // stop after this many x, as if interrupted
    std::ostream* diagnostics = nullptr;             // skip notices; stderr when null
};

struct SearchSummary {
    bool interrupted = false;
    std::size_t records = 0;
    std::size_t skipped = 0;
    std::string ts;
    std::filesystem::path out;
    std::filesystem::path log;
};

// Contiguous split of [lo, hi]; empty subranges have lo > hi.
std::vector<std::pair<std::uint64_t, std::uint64_t>> shard_ranges(std::uint64_t lo, std::uint64_t hi, unsigned n);

SearchSummary run_search(const SearchOptions& opt);

// Async-signal-safe; the running search checkpoints and returns.
void request_search_stop();
void reset_search_stop();

// SOURCE_DATE_EPOCH when set, otherwise the current time; ISO 8601 UTC.
std::string run_timestamp();

std::filesystem::path default_output_dir();  // OPN_OUTPUT_DIR or the working directory

}  // namespace opn
