#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opn/gap.hpp"
#include "opn/opn.hpp"

namespace opn {

struct BetaRow {
    unsigned long beta = 0;
    Int r_standard;
    std::optional<Int> r_seven;  // only where the coefficient 7 applies
    Int r_classical;
    Int exp_improved;
    Int exp_classical;
};

struct LRow {
    unsigned l = 0;
    BoundReport chain;
    unsigned max_solutions = 0;  // lemma0_verdict
};

std::vector<BetaRow> beta_table(unsigned long lo, unsigned long hi);
// Primes l >= 19 in [lo, hi].
std::vector<LRow> l_table(unsigned long lo, unsigned long hi, const PrecisionPolicy& policy = {});

std::string format_beta_table(const std::vector<BetaRow>& rows);
std::string format_l_table(const std::vector<LRow>& rows);
nlohmann::ordered_json beta_table_json(const std::vector<BetaRow>& rows);
nlohmann::ordered_json l_table_json(const std::vector<LRow>& rows);

std::string format_bound_report(const BoundReport& r);
nlohmann::ordered_json bound_report_json(const BoundReport& r);
nlohmann::ordered_json interval_json(const RationalInterval& v, int digits = 12);

inline constexpr const char* kExceedsClassical = "exceeds classical bound";

}  // namespace opn
