#include "opn/report.hpp"

#include <iomanip>
#include <sstream>

#include "opn/errors.hpp"

namespace opn {

using ojson = nlohmann::ordered_json;

namespace {

std::string render(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) os << "  ";
            if (c + 1 == cells.size()) os << cells[c];
            else os << std::setw(static_cast<int>(width[c])) << cells[c];
        }
        os << '\n';
    };
    line(header);
    for (const auto& row : rows) line(row);
    return os.str();
}

const NamedBound& key_bound(const BoundReport& r) { return r.bound(r.l >= 59 ? "log q4" : "log q5"); }

}  // namespace

std::vector<BetaRow> beta_table(unsigned long lo, unsigned long hi) {
    std::vector<BetaRow> rows;
    if (lo == 0) lo = 1;
    for (unsigned long b = lo; b <= hi; ++b) {
        BetaRow row;
        row.beta = b;
        row.r_standard = r_bound(b);
        try {
            row.r_seven = r_bound(b, RVariant::seven);
        } catch (const DomainError&) {
        }
        row.r_classical = classical_r_bound(b);
        const auto e = n_bound_exponents(b);
        row.exp_improved = e.improved;
        row.exp_classical = e.classical;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<LRow> l_table(unsigned long lo, unsigned long hi, const PrecisionPolicy& policy) {
    std::vector<LRow> rows;
    for (unsigned long l = std::max(lo, 19ul); l <= hi; ++l) {
        if (!is_probable_prime(Int(l))) continue;
        const unsigned ll = static_cast<unsigned>(l);
        rows.push_back({ll, bound_chain(ll, policy), lemma0_verdict(ll, policy)});
    }
    return rows;
}

std::string format_beta_table(const std::vector<BetaRow>& rows) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        cells.push_back({std::to_string(r.beta), r.r_standard.get_str(), r.r_seven ? r.r_seven->get_str() : "-",
                         r.r_classical.get_str(), r.exp_improved.get_str(), r.exp_classical.get_str()});
    }
    return render({"beta", "r_bound", "r_bound(7)", "r_classical", "N_exp", "N_exp_classical"}, cells);
}

std::string format_l_table(const std::vector<LRow>& rows) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        const NamedBound& kb = key_bound(r.chain);
        const BoundCheck& last = r.chain.checks.back();
        cells.push_back({std::to_string(r.l), r.chain.D.get_str(), decimal_floor(r.chain.abs_R.lo(), 6),
                         r.chain.p_min.get_str(), kb.name + " > " + decimal_floor(kb.value.lo(), 2),
                         decimal_floor(last.lhs.lo(), 2) + " > " + decimal_floor(last.threshold.hi(), 2),
                         std::to_string(r.max_solutions),
                         r.chain.exceeds_classical ? kExceedsClassical : "not certified"});
    }
    return render({"l", "D", "|R|", "p_min", "key bound", "loglog vs l^2 log 4", "max_sol", "verdict"}, cells);
}

ojson interval_json(const RationalInterval& v, int digits) {
    std::string hi = decimal_floor(-v.hi(), digits);
    hi = hi[0] == '-' ? hi.substr(1) : (hi == "0" ? hi : "-" + hi);
    return ojson{{"lo", decimal_floor(v.lo(), digits)}, {"hi", hi}};
}

ojson beta_table_json(const std::vector<BetaRow>& rows) {
    ojson out = ojson::array();
    for (const auto& r : rows) {
        out.push_back({{"beta", r.beta},
                       {"r_bound", r.r_standard.get_str()},
                       {"r_bound_seven", r.r_seven ? ojson(r.r_seven->get_str()) : ojson(nullptr)},
                       {"r_classical", r.r_classical.get_str()},
                       {"n_exponent", r.exp_improved.get_str()},
                       {"n_exponent_classical", r.exp_classical.get_str()}});
    }
    return out;
}

ojson bound_report_json(const BoundReport& r) {
    ojson chain = ojson::array();
    for (const auto& b : r.chain) {
        ojson e{{"name", b.name}, {"scale", to_string(b.scale)}, {"lower", decimal_floor(b.value.lo(), 6)}};
        if (b.exact) e["exact"] = b.exact->get_str();
        e["informational"] = b.informational;
        chain.push_back(std::move(e));
    }
    ojson checks = ojson::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"scale", to_string(c.scale)},
                          {"lhs_lower", decimal_floor(c.lhs.lo(), 6)},
                          {"threshold_upper", c.threshold.to_string(6)},
                          {"certified", c.certified}});
    }
    return ojson{{"l", r.l},
                 {"D", r.D.get_str()},
                 {"abs_R", interval_json(r.abs_R)},
                 {"r_prime", interval_json(r.r_prime)},
                 {"p_min", r.p_min.get_str()},
                 {"bits", r.bits},
                 {"chain", chain},
                 {"checks", checks},
                 {"verdict", r.exceeds_classical ? kExceedsClassical : "not certified"}};
}

ojson l_table_json(const std::vector<LRow>& rows) {
    ojson out = ojson::array();
    for (const auto& r : rows) {
        ojson row = bound_report_json(r.chain);
        row["max_solutions"] = r.max_solutions;
        out.push_back(std::move(row));
    }
    return out;
}

std::string format_bound_report(const BoundReport& r) {
    std::ostringstream os;
    os << "l = " << r.l << ", D = " << r.D << ", |R| in " << r.abs_R.to_string(10) << ", R' = 0.397|R| >= "
       << decimal_floor(r.r_prime.lo(), 10) << ", p >= " << r.p_min << " (least prime = 1 mod 2l)\n";
    for (const auto& b : r.chain) {
        os << "  " << b.name << " ";
        if (b.exact) os << ">= " << *b.exact;
        else os << "> " << decimal_floor(b.value.lo(), 4);
        os << "  [" << to_string(b.scale) << (b.informational ? ", informational" : "") << "]\n";
    }
    for (const auto& c : r.checks) {
        os << "  check " << c.name << ": " << decimal_floor(c.lhs.lo(), 4) << " > " << c.threshold.to_string(8)
           << (c.certified ? "  certified" : "  FAILED") << '\n';
    }
    os << "  verdict: " << (r.exceeds_classical ? kExceedsClassical : "not certified") << " (" << r.bits
       << " bits)\n";
    return os.str();
}

}  // namespace opn
