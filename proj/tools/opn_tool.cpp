#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "opn/arith.hpp"
#include "opn/cyclotomic.hpp"
#include "opn/errors.hpp"
#include "opn/gap.hpp"
#include "opn/opn.hpp"
#include "opn/quadfield.hpp"
#include "opn/report.hpp"
#include "opn/search.hpp"

using namespace opn;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kVerified = 0;
constexpr int kViolated = 1;
constexpr int kUsage = 2;

struct Outcome {
    int code = kVerified;
    std::string text;
    ojson json;
};

struct Params {
    std::string target;
    unsigned l = 0;
    std::string D;
    std::vector<std::string> x, m;
    std::string p, q, form;
    bool json = false;
    long precision_cap = PrecisionPolicy{}.cap_bits;
};

Int big(const std::string& s, const char* what) {
    try {
        return Int(s, 10);
    } catch (const std::invalid_argument&) {
        throw DomainError(std::string(what) + ": not an integer: '" + s + "'");
    }
}

void need(bool ok, const std::string& what) {
    if (!ok) throw DomainError("missing or malformed " + what);
}

ojson strs(const std::vector<std::string>& v) { return ojson(v); }

Outcome premise_failure(const std::string& target, const std::vector<std::string>& errs) {
    Outcome o{kUsage, "", {}};
    o.text = target + ": premise failed\n";
    for (const auto& e : errs) o.text += "  " + e + "\n";
    o.json = {{"target", target}, {"status", "premise_failed"}, {"errors", strs(errs)}};
    return o;
}

Outcome verify_smallrange(const Params& a, const PrecisionPolicy& pol) {
    const auto r = lemma3_smallrange_verify(a.l, pol);
    Outcome o;
    std::ostringstream os;
    os << "lemma3-smallrange l=" << a.l << ": range (" << r.lo << ", " << r.hi << ")";
    if (r.empty) os << " empty range, vacuously verified\n";
    else os << ", " << r.results.size() << " values, " << r.failures.size() << " failures\n";
    ojson fails = ojson::array();
    for (const auto& x : r.failures) fails.push_back(x.get_str());
    for (const auto& x : r.failures) os << "  counterexample x=" << x << "\n";
    o.code = r.pass() ? kVerified : kViolated;
    o.text = os.str();
    o.json = {{"target", "lemma3-smallrange"}, {"l", a.l},         {"lo", r.lo.get_str()},
              {"hi", r.hi.get_str()},          {"empty", r.empty}, {"checked", r.results.size()},
              {"failures", fails},             {"verified", r.pass()}};
    return o;
}

Outcome verify_ratio(const Params& a, const PrecisionPolicy& pol) {
    need(a.x.size() == 1, "--x");
    const Int x = big(a.x[0], "--x");
    const auto v = lemma3_ratio_check(a.l, x, pol);
    const Rational lo = ratio_lower_constant() / Rational(x), hi = ratio_upper_constant() / Rational(x);
    Outcome o;
    o.code = v.pass() ? kVerified : kViolated;
    o.text = "lemma3-ratio l=" + std::to_string(a.l) + " x=" + x.get_str() + ": ratio in " + v.ratio.to_string(15) +
             ", bounds (" + decimal_floor(lo, 15) + ", " + decimal_floor(hi, 15) + ") " +
             (v.pass() ? "verified" : "VIOLATED") + "\n";
    o.json = {{"target", "lemma3-ratio"}, {"l", a.l},          {"x", x.get_str()},
              {"ratio", interval_json(v.ratio, 20)},            {"lower_ok", v.lower_ok},
              {"upper_ok", v.upper_ok},    {"bits", v.bits},   {"verified", v.pass()}};
    return o;
}

Outcome verify_largex(const Params& a) {
    need(a.x.size() == 1, "--x");
    const Int x = big(a.x[0], "--x");
    const auto v = lemma3_largex_bounds(a.l, x);
    Outcome o;
    o.code = v.pass() ? kVerified : kViolated;
    o.text = "lemma3-largex l=" + std::to_string(a.l) + " x=" + x.get_str() + ": P bound " +
             (v.p_bound ? "holds" : "FAILS") + ", Q bound " + (v.q_bound ? "holds" : "FAILS") + "\n";
    o.json = {{"target", "lemma3-largex"}, {"l", a.l},           {"x", x.get_str()},
              {"p_bound", v.p_bound},       {"q_bound", v.q_bound}, {"verified", v.pass()}};
    return o;
}

Outcome verify_lemma4(const Params& a) {
    need(a.x.size() == 2 && a.m.size() == 2, "--x x1,x2 and --m m1,m2");
    const Int x1 = big(a.x[0], "--x"), x2 = big(a.x[1], "--x");
    const unsigned long m1 = to_ulong_checked(big(a.m[0], "--m"), "m1");
    const unsigned long m2 = to_ulong_checked(big(a.m[1], "--m"), "m2");
    const auto r = lemma4_verify(a.l, x1, x2, big(a.p, "--p"), m1, m2, big(a.q, "--q"));
    if (!r.premises_ok()) return premise_failure("lemma4", r.premise_errors);
    Outcome o;
    o.code = r.conclusion ? kVerified : kViolated;
    o.text = "lemma4 l=" + std::to_string(a.l) + ": x2 = " + x2.get_str() + (r.conclusion ? " > " : " <= ") +
             r.threshold.get_str() + " = x1^" + std::to_string(gap_exponent(a.l)) + "; residues " +
             std::to_string(r.residues.distinct) + " distinct of " + std::to_string(r.residues.pairs) +
             ", count bound " + std::to_string(r.count_lower_bound) + "\n";
    o.json = {{"target", "lemma4"},
              {"l", a.l},
              {"threshold", r.threshold.get_str()},
              {"modulus", r.modulus.get_str()},
              {"pairs", r.residues.pairs},
              {"distinct", r.residues.distinct},
              {"all_roots", r.residues.all_roots},
              {"count_lower_bound", r.count_lower_bound},
              {"verified", r.conclusion}};
    if (!r.conclusion) o.json["witness"] = {{"x1", x1.get_str()}, {"x2", x2.get_str()}, {"m1", m1}, {"m2", m2}};
    return o;
}

Outcome verify_lemma5(const Params& a, const PrecisionPolicy& pol) {
    need(a.x.size() == 3 && a.m.size() == 3, "--x x1,x2,x3 and --m m1,m2,m3");
    std::vector<Solution> sols;
    for (int i = 0; i < 3; ++i) {
        sols.push_back({big(a.x[i], "--x"), to_ulong_checked(big(a.m[i], "--m"), "m")});
    }
    const auto r = lemma5_verify(a.l, sols, big(a.p, "--p"), big(a.q, "--q"), pol);
    if (!r.premises_ok()) return premise_failure("lemma5", r.premise_errors);
    Outcome o;
    o.code = r.conclusion ? kVerified : kViolated;
    o.text = "lemma5 l=" + std::to_string(a.l) + ": m3 = " + a.m[2] + (r.conclusion ? " > " : " <= ") +
             "0.397|R|x1 in " + r.threshold.to_string(10) + "; b!=0 branch " + (r.branch_b_nonzero ? "holds" : "fails") +
             ", b=0 branch " + (r.branch_b_zero ? "holds" : "fails") + "\n";
    o.json = {{"target", "lemma5"},
              {"l", a.l},
              {"threshold", interval_json(r.threshold)},
              {"branch_b_nonzero", r.branch_b_nonzero},
              {"branch_b_zero", r.branch_b_zero},
              {"verified", r.conclusion}};
    if (!r.conclusion) o.json["witness"] = {{"x", strs(a.x)}, {"m", strs(a.m)}, {"p", a.p}, {"q", a.q}};
    return o;
}

Outcome verify_branch(const Params& a, const PrecisionPolicy& pol) {
    const auto c = lemma5_branch_constant(a.l, pol);
    Outcome o;
    o.code = c.holds ? kVerified : kViolated;
    o.text = "lemma5-branch l=" + std::to_string(a.l) + ": " + c.detail + (c.holds ? " verified\n" : " VIOLATED\n");
    o.json = {{"target", "lemma5-branch"}, {"l", a.l}, {"detail", c.detail}, {"verified", c.holds}};
    return o;
}

Outcome verify_chain(const Params& a, const PrecisionPolicy& pol) {
    const auto r = bound_chain(a.l, pol);
    Outcome o;
    o.code = r.all_checks_pass() ? kVerified : kViolated;
    o.text = format_bound_report(r);
    o.json = bound_report_json(r);
    o.json["target"] = "bound-chain";
    o.json["verified"] = r.all_checks_pass();
    return o;
}

Outcome verify_lemma0(const Params& a, const PrecisionPolicy& pol) {
    Outcome o;
    try {
        const unsigned n = lemma0_verdict(a.l, pol);
        o.text = "lemma0 l=" + std::to_string(a.l) + ": at most " + std::to_string(n) + " solutions per q\n";
        o.json = {{"target", "lemma0"}, {"l", a.l}, {"max_solutions", n}, {"verified", true}};
    } catch (const InternalError& e) {
        o.code = kViolated;
        o.text = std::string("lemma0: ") + e.what() + "\n";
        o.json = {{"target", "lemma0"}, {"l", a.l}, {"error", e.what()}, {"verified", false}};
    }
    return o;
}

Outcome verify_faiziev(const Params& a, const PrecisionPolicy& pol) {
    const Int D = a.D.empty() ? Int(a.l) : big(a.D, "--D");
    const bool ok = faiziev_check(D, pol);
    const auto R = abs_regulator(D, 12, pol);
    Outcome o;
    o.code = ok ? kVerified : kViolated;
    o.text = "faiziev D=" + D.get_str() + ": R in " + R.to_string(12) + (ok ? " < " : " NOT < ") + "sqrt(D) log(4D)\n";
    o.json = {{"target", "faiziev"}, {"D", D.get_str()}, {"R", interval_json(R)}, {"verified", ok}};
    return o;
}

const char* status_name(Eq21Status s) {
    switch (s) {
        case Eq21Status::verified: return "verified";
        case Eq21Status::premise_failed: return "premise_failed";
        case Eq21Status::relation_failed: return "relation_failed";
    }
    return "?";
}

Outcome verify_eq21(const Params& a) {
    need(a.x.size() == 1 && a.m.size() == 1, "--x and --m");
    const auto r = eq21_verify(a.l, big(a.x[0], "--x"), big(a.p, "--p"),
                               to_ulong_checked(big(a.m[0], "--m"), "m"), big(a.q, "--q"));
    if (r.status == Eq21Status::premise_failed) return premise_failure("eq21", {r.message});
    Outcome o;
    o.code = r.status == Eq21Status::verified ? kVerified : kViolated;
    o.text = "eq21 l=" + std::to_string(a.l) + " x=" + a.x[0] + ": X=" + r.X.get_str() + " Y=" + r.Y.get_str() +
             " coprime=" + (r.coprime ? "yes" : "no") + " sign_p=" + std::to_string(r.sign_p) +
             " sign_q=" + std::to_string(r.sign_q) + " " + status_name(r.status) +
             (r.message.empty() ? "" : " (" + r.message + ")") + "\n";
    o.json = {{"target", "eq21"},     {"X", r.X.get_str()},       {"Y", r.Y.get_str()},
              {"coprime", r.coprime}, {"norm", r.norm.get_str()}, {"xi_val_p", r.xi_val_p},
              {"xi_val_p_bar", r.xi_val_p_bar}, {"xi_val_q", r.xi_val_q}, {"xi_val_q_bar", r.xi_val_q_bar},
              {"sign_p", r.sign_p},   {"sign_q", r.sign_q},       {"status", status_name(r.status)},
              {"verified", r.status == Eq21Status::verified}};
    return o;
}

EulerFormNumber parse_form(std::string text) {
    if (!text.empty() && text[0] == '@') {
        std::ifstream in(text.substr(1));
        if (!in) throw DomainError("cannot read " + text.substr(1));
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    try {
        const ojson j = ojson::parse(text);
        auto num = [](const ojson& v) { return v.is_string() ? Int(v.get<std::string>(), 10) : Int(v.dump(), 10); };
        std::vector<Int> q;
        for (const auto& v : j.at("q")) q.push_back(num(v));
        return make_euler_form(num(j.at("p")), j.at("alpha").get<unsigned long>(), std::move(q),
                               j.at("beta").get<unsigned long>());
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("--form: ") + e.what());
    }
}

Outcome verify_partition(const Params& a) {
    need(!a.form.empty(), "--form");
    const EulerFormNumber form = parse_form(a.form);
    const auto choice = choose_l(form);
    if (!choice) return premise_failure("partition", {"no prime factor of 2*beta+1 occurs among the q_i"});
    const auto res = partition_STU(form, choice->l, choice->i0);
    const auto chk = t_bound_check(res, form.beta);
    auto idx = [](const std::vector<std::size_t>& v) { return ojson(v); };
    Outcome o;
    o.code = chk.pass() ? kVerified : kViolated;
    std::ostringstream os;
    os << "partition l=" << res.l << " i0=" << res.i0 << " #S=" << res.S.size() << " #T=" << res.T.size()
       << " #U=" << res.U.size() << " gamma=" << res.gamma << " s=" << res.s
       << " beta_gate=" << (form.meets_beta_gate() ? "yes" : "no") << "\n  " << chk.detail() << "\n";
    o.text = os.str();
    ojson f = ojson::object();
    for (const auto& [i, v] : res.f) f[std::to_string(i)] = v;
    o.json = {{"target", "partition"}, {"l", res.l.get_str()}, {"i0", res.i0}, {"S", idx(res.S)},
              {"T", idx(res.T)},       {"U", idx(res.U)},      {"f", f},      {"delta", res.delta},
              {"gamma", res.gamma},    {"s", res.s},           {"beta_gate", form.meets_beta_gate()},
              {"t_bound", chk.t_bound}, {"detail", chk.detail()}, {"verified", chk.pass()}};
    return o;
}

Outcome run_verify(const Params& a) {
    PrecisionPolicy pol;
    pol.cap_bits = a.precision_cap;
    const std::string& t = a.target;
    if (t == "lemma3-smallrange") return verify_smallrange(a, pol);
    if (t == "lemma3-ratio") return verify_ratio(a, pol);
    if (t == "lemma3-largex") return verify_largex(a);
    if (t == "lemma4") return verify_lemma4(a);
    if (t == "lemma5") return verify_lemma5(a, pol);
    if (t == "lemma5-branch") return verify_branch(a, pol);
    if (t == "bound-chain") return verify_chain(a, pol);
    if (t == "lemma0") return verify_lemma0(a, pol);
    if (t == "faiziev") return verify_faiziev(a, pol);
    if (t == "eq21") return verify_eq21(a);
    if (t == "partition") return verify_partition(a);
    throw DomainError("unknown verify target " + t);
}

struct Range {
    std::uint64_t lo = 0, hi = 0;
    bool empty() const { return lo > hi; }
};

Range parse_range(const std::string& s) {
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            const auto v = std::stoull(s);
            return {v, v};
        }
        return {std::stoull(s.substr(0, dots)), std::stoull(s.substr(dots + 2))};
    } catch (const std::exception&) {
        throw DomainError("range must look like lo..hi, got '" + s + "'");
    }
}

void on_sigint(int) { request_search_stop(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounds for odd perfect numbers: lemma verifiers, bound tables and a cyclotomic search"};
    app.require_subcommand(1);

    Params a;
    const std::vector<std::string> targets{"lemma3-smallrange", "lemma3-ratio", "lemma3-largex", "lemma4",
                                           "lemma5",            "lemma5-branch", "bound-chain",  "lemma0",
                                           "faiziev",           "eq21",          "partition"};
    auto* verify = app.add_subcommand("verify", "Check one lemma or bound; exit 0 verified, 1 violated, 2 error");
    verify->add_option("target", a.target, "What to verify")->required()->check(CLI::IsMember(targets));
    verify->add_option("--l", a.l, "Prime l");
    verify->add_option("--x", a.x, "x, or x1,x2[,x3]")->delimiter(',');
    verify->add_option("--m", a.m, "m, or m1,m2[,m3]")->delimiter(',');
    verify->add_option("--p", a.p, "Prime p");
    verify->add_option("--q", a.q, "Prime q");
    verify->add_option("--D", a.D, "Discriminant for faiziev (default: l)");
    verify->add_option("--form", a.form, "Euler form as JSON {p, alpha, beta, q: [...]}, or @file");
    verify->add_option("--precision-cap", a.precision_cap, "Largest working precision in bits");
    verify->add_flag("--json", a.json, "Machine-readable output");

    unsigned sl = 0;
    std::string srange;
    unsigned shards = 1;
    unsigned long sbudget = SearchOptions{}.budget.rho_iterations;
    std::string sout;
    bool resume = false;
    std::uint64_t interrupt_after = 0;
    bool sjson = false;
    auto* search = app.add_subcommand("search", "Find prime x with Phi_l(x) = p^m q");
    search->add_option("--l", sl, "Prime l")->required();
    search->add_option("--range", srange, "x range lo..hi")->required();
    search->add_option("--shards", shards, "Concurrent shards")->check(CLI::Range(1u, 256u));
    search->add_option("--budget", sbudget, "Rho iterations per x before skipping it");
    search->add_option("--out", sout, "Output file (default: $OPN_OUTPUT_DIR/search_l<l>_<lo>_<hi>.jsonl)");
    search->add_flag("--resume", resume, "Continue from checkpoints");
    search->add_option("--interrupt-after", interrupt_after)->group("");
    search->add_flag("--json", sjson, "Print the summary as JSON");

    std::string beta_range, l_range;
    bool rjson = false;
    long rcap = PrecisionPolicy{}.cap_bits;
    auto* report = app.add_subcommand("report", "Tabulate r and N bounds by beta, bound chains by l");
    report->add_option("--beta", beta_range, "beta range lo..hi");
    report->add_option("--l", l_range, "l range lo..hi");
    report->add_option("--precision-cap", rcap, "Largest working precision in bits");
    report->add_flag("--json", rjson, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        if (*verify) {
            const Outcome o = run_verify(a);
            if (a.json) std::cout << o.json.dump(2) << "\n";
            else std::cout << o.text;
            return o.code;
        }
        if (*search) {
            const Range r = parse_range(srange);
            SearchOptions opt;
            opt.l = sl;
            opt.lo = r.lo;
            opt.hi = r.hi;
            opt.shards = shards;
            opt.budget.rho_iterations = sbudget;
            opt.out = sout.empty() ? default_output_dir() / ("search_l" + std::to_string(sl) + "_" +
                                                             std::to_string(r.lo) + "_" + std::to_string(r.hi) +
                                                             ".jsonl")
                                   : std::filesystem::path(sout);
            opt.resume = resume;
            if (interrupt_after > 0) opt.interrupt_after = interrupt_after;
            std::signal(SIGINT, on_sigint);
            const SearchSummary s = run_search(opt);
            if (sjson) {
                std::cout << ojson{{"out", s.out.string()},     {"log", s.log.string()}, {"records", s.records},
                                   {"skipped", s.skipped},       {"ts", s.ts},
                                   {"interrupted", s.interrupted}}
                                 .dump()
                          << "\n";
            } else if (s.interrupted) {
                std::cout << "interrupted; checkpoints saved next to " << s.out.string() << ", rerun with --resume\n";
            } else {
                std::cout << s.records << " records written to " << s.out.string() << "; " << s.skipped
                          << " x skipped (see " << s.log.string() << ")\n";
            }
            return s.interrupted ? kUsage : kVerified;
        }
        if (*report) {
            PrecisionPolicy pol;
            pol.cap_bits = rcap;
            ojson out = ojson::object();
            std::string text;
            if (!beta_range.empty()) {
                const Range r = parse_range(beta_range);
                const auto rows = r.empty() ? std::vector<BetaRow>{} : beta_table(r.lo, r.hi);
                out["beta"] = beta_table_json(rows);
                text += format_beta_table(rows);
            }
            if (!l_range.empty()) {
                const Range r = parse_range(l_range);
                const auto rows = r.empty() ? std::vector<LRow>{} : l_table(r.lo, r.hi, pol);
                out["l"] = l_table_json(rows);
                if (!text.empty()) text += "\n";
                text += format_l_table(rows);
            }
            if (beta_range.empty() && l_range.empty()) throw DomainError("report needs --beta and/or --l");
            if (rjson) std::cout << out.dump(2) << "\n";
            else std::cout << text;
            return kVerified;
        }
    } catch (const UndecidableError& e) {
        std::cerr << "undecidable: " << e.what() << "; raise --precision-cap\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kUsage;
    } catch (const InternalError& e) {
        std::cerr << "inconsistency: " << e.what() << "\n";
        return kViolated;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
