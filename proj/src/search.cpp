#include "opn/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "opn/cyclotomic.hpp"
#include "opn/errors.hpp"

namespace opn {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::atomic<bool> g_stop{false};

bool proven(const Int& n, const FactorBudget& budget) {
    const Primality pr = primality(n);
    if (pr == Primality::prime) return true;
    return pr == Primality::probable_prime && is_certified_prime(n, budget);
}

Int gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

std::vector<std::string> read_lines(const fs::path& file) {
    std::vector<std::string> lines;
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void write_atomic(const fs::path& file, const std::string& content) {
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ResourceError("write failed: " + tmp.string());
    }
    fs::rename(tmp, file);
}

std::uint64_t line_x(const std::string& line) { return ojson::parse(line).at("x").get<std::uint64_t>(); }

// Keeps only lines with x <= last_done; later ones are recomputed on resume.
void truncate_after(const fs::path& file, std::uint64_t last_done) {
    if (!fs::exists(file)) return;
    std::string kept;
    for (const auto& line : read_lines(file)) {
        if (line_x(line) <= last_done) kept += line + "\n";
    }
    write_atomic(file, kept);
}

std::string skip_to_json(unsigned l, std::uint64_t x, const XAnalysis& a) {
    ojson j;
    j["l"] = l;
    j["x"] = x;
    j["reason"] = a.reason;
    j["unfactored"] = ojson::array();
    for (const auto& u : a.unfactored) j["unfactored"].push_back(u.get_str());
    return j.dump();
}

fs::path with_suffix(const fs::path& out, const std::string& suffix) { return fs::path(out.string() + suffix); }

}  // namespace

bool record_less(const SolutionRecord& a, const SolutionRecord& b) {
    if (a.l != b.l) return a.l < b.l;
    if (a.x != b.x) return a.x < b.x;
    if (a.p != b.p) return a.p < b.p;
    return a.m < b.m;
}

std::vector<std::string> record_errors(const SolutionRecord& r) {
    std::vector<std::string> errs;
    if (r.l < 3 || !is_probable_prime(Int(r.l))) errs.push_back("l: must be an odd prime");
    if (r.x < 2) errs.push_back("x: must be at least 2");
    if (!is_probable_prime(r.p)) errs.push_back("p: not prime");
    if (!is_probable_prime(r.q)) errs.push_back("q: not prime");
    if (r.m == 0 && r.p != r.q) errs.push_back("p: must equal q when m = 0");
    if (r.m > 0 && r.p == r.q) errs.push_back("p, q: must be distinct when m > 0");
    if (!errs.empty()) return errs;
    if (r.q % r.l != 1) errs.push_back("q: not 1 mod l");
    const Int phi = phi_eval(r.l, Int(std::to_string(r.x), 10));
    if (phi != pow(r.p, r.m) * r.q) {
        errs.push_back("Phi_" + std::to_string(r.l) + "(" + std::to_string(r.x) + ") = " + phi.get_str() +
                       " is not p^m q");
    }
    return errs;
}

std::string record_to_json(const SolutionRecord& r) {
    ojson j;
    j["l"] = r.l;
    j["x"] = r.x;
    j["p"] = r.p.get_str();
    j["m"] = r.m;
    j["q"] = r.q.get_str();
    j["certified"] = r.certified;
    j["ts"] = r.ts;
    return j.dump();
}

SolutionRecord record_from_json(const std::string& line) {
    SolutionRecord r;
    try {
        const ojson j = ojson::parse(line);
        const std::set<std::string> expected{"l", "x", "p", "m", "q", "certified", "ts"};
        std::set<std::string> keys;
        for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
        if (keys != expected) throw DomainError("record keys must be exactly l, x, p, m, q, certified, ts");
        r.l = j.at("l").get<unsigned>();
        r.x = j.at("x").get<std::uint64_t>();
        r.p = Int(j.at("p").get<std::string>(), 10);
        r.m = j.at("m").get<unsigned long>();
        r.q = Int(j.at("q").get<std::string>(), 10);
        r.certified = j.at("certified").get<bool>();
        r.ts = j.at("ts").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed record: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw DomainError("malformed record: p and q must be decimal strings");
    }
    const auto errs = record_errors(r);
    if (!errs.empty()) throw DomainError("record l=" + std::to_string(r.l) + " x=" + std::to_string(r.x) +
                                         " fails re-verification: " + errs.front());
    return r;
}

std::vector<SolutionRecord> load_records(const fs::path& file) {
    if (!fs::exists(file)) throw ResourceError("no such record file: " + file.string());
    std::vector<SolutionRecord> out;
    for (const auto& line : read_lines(file)) out.push_back(record_from_json(line));
    return out;
}

XAnalysis analyze_x(unsigned l, std::uint64_t x, const FactorBudget& budget, const std::string& ts) {
    XAnalysis a;
    const Int X(std::to_string(x), 10);
    if (x < 2 || x % l == 1 || !is_probable_prime(X)) return a;
    const Int phi = phi_eval(l, X);
    const PartialFactorization pf = factor_partial(phi, budget);
    const auto& K = pf.factors;

    auto emit = [&](const Int& p, unsigned long m, const Int& q) {
        a.records.push_back({l, x, p, m, q, proven(p, budget) && proven(q, budget), ts});
    };

    if (pf.complete()) {
        a.outcome = XOutcome::no_record;
        if (K.size() == 1 && K[0].exponent == 1) {
            emit(K[0].prime, 0, K[0].prime);
        } else if (K.size() == 2) {
            if (K[1].exponent == 1) emit(K[0].prime, K[0].exponent, K[1].prime);
            if (K[0].exponent == 1) emit(K[1].prime, K[1].exponent, K[0].prime);
        }
        if (!a.records.empty()) a.outcome = XOutcome::records;
        std::sort(a.records.begin(), a.records.end(), record_less);
        return a;
    }

    // Leftovers are composite and not perfect powers, so each has two distinct primes.
    Int known = 1;
    for (const auto& f : K) known *= f.prime;
    bool new_primes = false;
    for (const auto& c : pf.unfactored) {
        if (gcd(c, known) == 1) new_primes = true;
    }
    const bool two_full_powers = K.size() == 2 && K[0].exponent >= 2 && K[1].exponent >= 2;
    if (K.size() >= 3 || (!K.empty() && new_primes) || two_full_powers ||
        (pf.unfactored.size() >= 2 && gcd(pf.unfactored.front(), pf.unfactored.back()) == 1)) {
        a.outcome = XOutcome::no_record;
        return a;
    }
    a.outcome = XOutcome::skipped;
    a.reason = "factorization budget exhausted";
    a.unfactored = pf.unfactored;
    return a;
}

std::string checkpoint_to_json(const SearchCheckpoint& c) {
    ojson j;
    j["l"] = c.l;
    j["lo"] = c.lo;
    j["hi"] = c.hi;
    j["last_done"] = c.last_done;
    j["shard"] = c.shard;
    j["ts"] = c.ts;
    return j.dump();
}

SearchCheckpoint checkpoint_from_json(const std::string& text) {
    try {
        const ojson j = ojson::parse(text);
        return SearchCheckpoint{j.at("l").get<unsigned>(), j.at("lo").get<std::uint64_t>(),
                                j.at("hi").get<std::uint64_t>(), j.at("last_done").get<std::uint64_t>(),
                                j.at("shard").get<unsigned>(), j.at("ts").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed checkpoint: ") + e.what());
    }
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> shard_ranges(std::uint64_t lo, std::uint64_t hi, unsigned n) {
    if (n == 0) throw DomainError("shard count must be positive");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    const std::uint64_t size = hi >= lo ? hi - lo + 1 : 0;
    std::uint64_t start = lo;
    for (unsigned i = 0; i < n; ++i) {
        const std::uint64_t len = size / n + (i < size % n ? 1 : 0);
        out.emplace_back(start, start + len - 1);  // len = 0 gives lo > hi
        start += len;
    }
    return out;
}

void request_search_stop() { g_stop.store(true); }
void reset_search_stop() { g_stop.store(false); }

std::string run_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"); sde && *sde) {
        try {
            t = static_cast<std::time_t>(std::stoll(sde));
        } catch (const std::exception&) {
            throw DomainError(std::string("SOURCE_DATE_EPOCH is not an integer: ") + sde);
        }
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path default_output_dir() {
    if (const char* d = std::getenv("OPN_OUTPUT_DIR"); d && *d) return d;
    return fs::current_path();
}

SearchSummary run_search(const SearchOptions& opt) {
    if (opt.l < 3 || !is_probable_prime(Int(opt.l))) throw DomainError("search: l must be an odd prime");
    if (opt.lo < 2 || opt.hi < opt.lo) throw DomainError("search: range must satisfy 2 <= lo <= hi");
    if (opt.hi > (std::uint64_t(1) << 62)) throw DomainError("search: hi must stay below 2^62");
    if (opt.out.empty()) throw DomainError("search: output path required");
    if (opt.out.has_parent_path()) fs::create_directories(opt.out.parent_path());

    reset_search_stop();
    std::ostream& diag = opt.diagnostics ? *opt.diagnostics : std::cerr;
    const auto ranges = shard_ranges(opt.lo, opt.hi, opt.shards);

    auto ckpt_path = [&](unsigned i) { return with_suffix(opt.out, ".shard" + std::to_string(i) + ".ckpt"); };
    auto rec_path = [&](unsigned i) { return with_suffix(opt.out, ".shard" + std::to_string(i) + ".jsonl"); };
    auto log_path = [&](unsigned i) { return with_suffix(opt.out, ".shard" + std::to_string(i) + ".log.jsonl"); };

    std::vector<SearchCheckpoint> start(opt.shards);
    std::string ts;
    for (unsigned i = 0; i < opt.shards; ++i) {
        SearchCheckpoint c{opt.l, ranges[i].first, ranges[i].second, ranges[i].first - 1, i, ""};
        if (opt.resume && fs::exists(ckpt_path(i))) {
            std::ifstream in(ckpt_path(i));
            const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            const SearchCheckpoint saved = checkpoint_from_json(text);
            if (saved.l != c.l || saved.lo != c.lo || saved.hi != c.hi || saved.shard != i) {
                throw DomainError("resume: checkpoint " + ckpt_path(i).string() +
                                  " belongs to a different l, range or shard count");
            }
            c.last_done = saved.last_done;
            if (ts.empty()) ts = saved.ts;
        }
        start[i] = c;
    }
    if (ts.empty()) ts = run_timestamp();

    for (unsigned i = 0; i < opt.shards; ++i) {
        start[i].ts = ts;
        if (opt.resume && fs::exists(ckpt_path(i))) {
            truncate_after(rec_path(i), start[i].last_done);
            truncate_after(log_path(i), start[i].last_done);
        } else {
            write_atomic(rec_path(i), "");
            write_atomic(log_path(i), "");
        }
        write_atomic(ckpt_path(i), checkpoint_to_json(start[i]) + "\n");
    }

    std::atomic<std::uint64_t> processed{0};
    std::atomic<std::size_t> skipped{0};
    std::mutex diag_mutex;
    std::vector<std::exception_ptr> errors(opt.shards);

    auto worker = [&](unsigned i) {
        try {
            SearchCheckpoint c = start[i];
            std::ofstream rec(rec_path(i), std::ios::binary | std::ios::app);
            std::ofstream log(log_path(i), std::ios::binary | std::ios::app);
            unsigned since_ckpt = 0;
            for (std::uint64_t x = c.last_done + 1; x <= c.hi && x >= c.lo; ++x) {
                if (g_stop.load()) break;
                const XAnalysis a = analyze_x(opt.l, x, opt.budget, ts);
                for (const auto& r : a.records) rec << record_to_json(r) << '\n';
                if (a.outcome == XOutcome::skipped) {
                    ++skipped;
                    log << skip_to_json(opt.l, x, a) << '\n';
                    std::lock_guard lock(diag_mutex);
                    diag << "skip l=" << opt.l << " x=" << x << ": " << a.reason << '\n';
                }
                c.last_done = x;
                const std::uint64_t n = ++processed;
                if (opt.interrupt_after && n >= *opt.interrupt_after) g_stop.store(true);
                if (++since_ckpt >= 256 || g_stop.load()) {
                    rec.flush();
                    log.flush();
                    write_atomic(ckpt_path(i), checkpoint_to_json(c) + "\n");
                    since_ckpt = 0;
                }
            }
            rec.flush();
            log.flush();
            write_atomic(ckpt_path(i), checkpoint_to_json(c) + "\n");
        } catch (...) {
            errors[i] = std::current_exception();
            g_stop.store(true);
        }
    };

    {
        std::vector<std::jthread> threads;
        for (unsigned i = 0; i < opt.shards; ++i) threads.emplace_back(worker, i);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    SearchSummary summary;
    summary.ts = ts;
    summary.out = opt.out;
    summary.log = with_suffix(opt.out, ".log.jsonl");
    summary.skipped = skipped.load();
    for (unsigned i = 0; i < opt.shards; ++i) {
        std::ifstream in(ckpt_path(i));
        const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const SearchCheckpoint c = checkpoint_from_json(text);
        if (c.lo <= c.hi && c.last_done < c.hi) summary.interrupted = true;
    }
    if (summary.interrupted) return summary;

    std::vector<SolutionRecord> all;
    std::vector<std::pair<std::uint64_t, std::string>> skips;
    for (unsigned i = 0; i < opt.shards; ++i) {
        auto part = load_records(rec_path(i));
        all.insert(all.end(), part.begin(), part.end());
        for (const auto& line : read_lines(log_path(i))) skips.emplace_back(line_x(line), line);
    }
    std::sort(all.begin(), all.end(), record_less);
    all.erase(std::unique(all.begin(), all.end()), all.end());
    std::sort(skips.begin(), skips.end());

    std::string text;
    for (const auto& r : all) text += record_to_json(r) + "\n";
    write_atomic(opt.out, text);
    std::string log_text;
    for (const auto& [x, line] : skips) log_text += line + "\n";
    write_atomic(summary.log, log_text);
    summary.records = all.size();
    summary.skipped = skips.size();
    return summary;
}

}  // namespace opn
