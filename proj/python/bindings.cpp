#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "opn/arith.hpp"
#include "opn/cyclotomic.hpp"
#include "opn/errors.hpp"
#include "opn/gap.hpp"
#include "opn/opn.hpp"
#include "opn/quadfield.hpp"
#include "opn/report.hpp"
#include "opn/search.hpp"

namespace py = pybind11;
using namespace opn;

namespace {

// Python int <-> mpz through decimal strings.
Int to_int(const py::int_& v) { return Int(py::str(static_cast<const py::handle&>(v)).cast<std::string>(), 10); }

py::int_ to_py(const Int& v) { return py::int_(py::reinterpret_steal<py::object>(PyLong_FromString(v.get_str().c_str(), nullptr, 10))); }

py::object to_fraction(const Rational& q) {
    static py::object Fraction = py::module_::import("fractions").attr("Fraction");
    return Fraction(to_py(q.get_num()), to_py(q.get_den()));
}

py::tuple interval(const RationalInterval& v) { return py::make_tuple(to_fraction(v.lo()), to_fraction(v.hi())); }

py::list int_list(const std::vector<Int>& v) {
    py::list out;
    for (const auto& x : v) out.append(to_py(x));
    return out;
}

PrecisionPolicy policy(long cap) {
    PrecisionPolicy p;
    p.cap_bits = cap;
    return p;
}

py::dict record_dict(const SolutionRecord& r) {
    py::dict d;
    d["l"] = r.l;
    d["x"] = r.x;
    d["p"] = to_py(r.p);
    d["m"] = r.m;
    d["q"] = to_py(r.q);
    d["certified"] = r.certified;
    d["ts"] = r.ts;
    return d;
}

py::list index_list(const std::vector<std::size_t>& v) {
    py::list out;
    for (auto i : v) out.append(i);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact and interval-certified number theory for odd perfect number bounds";

    static py::exception<DomainError> domain_exc(m, "DomainError", PyExc_ValueError);
    static py::exception<ResourceError> resource_exc(m, "ResourceError", PyExc_RuntimeError);
    static py::exception<UndecidableError> undecidable_exc(m, "UndecidableError", PyExc_ArithmeticError);
    static py::exception<InternalError> internal_exc(m, "InternalError", PyExc_AssertionError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError& e) {
            PyErr_SetString(domain_exc.ptr(), e.what());
        } catch (const ResourceError& e) {
            PyErr_SetString(resource_exc.ptr(), e.what());
        } catch (const UndecidableError& e) {
            PyErr_SetString(undecidable_exc.ptr(), e.what());
        } catch (const InternalError& e) {
            PyErr_SetString(internal_exc.ptr(), e.what());
        }
    });

    const long default_cap = PrecisionPolicy{}.cap_bits;

    // arithmetic
    m.def("is_probable_prime", [](const py::int_& n) { return is_probable_prime(to_int(n)); });
    m.def("is_certified_prime", [](const py::int_& n) { return is_certified_prime(to_int(n)); });
    m.def("factorize", [](const py::int_& n) {
        py::list out;
        for (const auto& f : factorize(to_int(n))) out.append(py::make_tuple(to_py(f.prime), f.exponent));
        return out;
    });
    m.def("sigma_pp", [](const py::int_& p, unsigned long a) { return to_py(sigma_pp(to_int(p), a)); });
    m.def("lemma1_divides", [](const py::int_& q, const py::int_& p, unsigned long c) {
        return lemma1_divides(to_int(q), to_int(p), c);
    });
    m.def("zsigmondy_primitive_factor", [](const py::int_& a, unsigned long n) -> py::object {
        const auto f = zsigmondy_primitive_factor(to_int(a), n);
        return f ? py::object(to_py(*f)) : py::none();
    });
    m.def("multiplicative_dependence", [](const py::int_& x1, const py::int_& x2) -> py::object {
        const auto d = multiplicative_dependence(to_int(x1), to_int(x2));
        if (!d) return py::none();
        return py::make_tuple(to_py(d->base), d->a, d->b);
    });

    // cyclotomic
    m.def("phi_eval", [](unsigned long n, const py::int_& x) { return to_py(phi_eval(n, to_int(x))); });
    m.def("half_factorization", [](unsigned l) {
        const auto hf = half_factorization(l);
        py::dict d;
        d["l"] = hf.l;
        d["D"] = to_py(hf.D);
        d["P"] = int_list(hf.P);
        d["Q"] = int_list(hf.Q);
        return d;
    });
    m.def("half_values", [](unsigned l, const py::int_& x) {
        const auto v = half_values(l, to_int(x));
        return py::make_tuple(to_py(v.X), to_py(v.Y));
    });
    m.def(
        "lemma3_ratio_check",
        [](unsigned l, const py::int_& x, long cap) {
            const auto v = lemma3_ratio_check(l, to_int(x), policy(cap));
            py::dict d;
            d["ratio"] = interval(v.ratio);
            d["lower_ok"] = v.lower_ok;
            d["upper_ok"] = v.upper_ok;
            d["verified"] = v.pass();
            return d;
        },
        py::arg("l"), py::arg("x"), py::arg("precision_cap") = default_cap);
    m.def(
        "lemma3_smallrange_verify",
        [](unsigned l, long cap) {
            const auto r = lemma3_smallrange_verify(l, policy(cap));
            py::dict d;
            d["l"] = r.l;
            d["lo"] = to_py(r.lo);
            d["hi"] = to_py(r.hi);
            d["empty"] = r.empty;
            d["count"] = r.results.size();
            d["failures"] = int_list(r.failures);
            d["verified"] = r.pass();
            return d;
        },
        py::arg("l"), py::arg("precision_cap") = default_cap);
    m.def("lemma3_largex_bounds", [](unsigned l, const py::int_& x) {
        const auto v = lemma3_largex_bounds(l, to_int(x));
        return py::make_tuple(v.p_bound, v.q_bound);
    });

    // quadratic fields
    m.def(
        "fundamental_unit",
        [](const py::int_& D, int digits) {
            const auto fu = fundamental_unit(to_int(D), digits);
            py::dict d;
            d["u"] = to_py(fu.epsilon.u);
            d["v"] = to_py(fu.epsilon.v);
            d["regulator"] = interval(fu.regulator);
            return d;
        },
        py::arg("D"), py::arg("digits") = 20);
    m.def("eq21_verify", [](unsigned l, const py::int_& x, const py::int_& p, unsigned long mm, const py::int_& q) {
        const auto r = eq21_verify(l, to_int(x), to_int(p), mm, to_int(q));
        py::dict d;
        d["status"] = r.status == Eq21Status::verified         ? "verified"
                      : r.status == Eq21Status::premise_failed ? "premise_failed"
                                                               : "relation_failed";
        d["message"] = r.message;
        d["sign_p"] = r.sign_p;
        d["sign_q"] = r.sign_q;
        return d;
    });
    m.def("xi_log_abs", [](unsigned l, const py::int_& x) { return interval(xi_log_abs(l, to_int(x))); });

    // gap principles and chains
    m.def("root_count_mod", [](unsigned long l, const py::int_& M) { return to_py(root_count_mod(l, to_int(M))); });
    m.def(
        "bound_chain",
        [](unsigned l, long cap) { return bound_report_json(bound_chain(l, policy(cap))).dump(); },
        py::arg("l"), py::arg("precision_cap") = default_cap);
    m.def(
        "lemma0_verdict", [](unsigned l, long cap) { return lemma0_verdict(l, policy(cap)); }, py::arg("l"),
        py::arg("precision_cap") = default_cap);

    // odd perfect number bounds
    m.def(
        "r_bound", [](unsigned long beta, bool seven) { return to_py(r_bound(beta, seven ? RVariant::seven : RVariant::standard)); },
        py::arg("beta"), py::arg("seven") = false);
    m.def("classical_r_bound", [](unsigned long beta) { return to_py(classical_r_bound(beta)); });
    m.def("n_bound_exponents", [](unsigned long beta) {
        const auto e = n_bound_exponents(beta);
        return py::make_tuple(to_py(e.improved), to_py(e.classical));
    });
    m.def("abundancy_is_two", [](const py::int_& n) { return abundancy_is_two(to_int(n)); });
    m.def(
        "partition",
        [](const py::int_& p, unsigned long alpha, const std::vector<py::int_>& q, unsigned long beta) -> py::object {
            std::vector<Int> qs;
            for (const auto& v : q) qs.push_back(to_int(v));
            const auto form = make_euler_form(to_int(p), alpha, qs, beta);
            const auto lc = choose_l(form);
            if (!lc) return py::none();
            const auto res = partition_STU(form, lc->l, lc->i0);
            const auto tb = t_bound_check(res, beta);
            py::dict d;
            d["l"] = to_py(res.l);
            d["i0"] = res.i0;
            d["S"] = index_list(res.S);
            d["T"] = index_list(res.T);
            d["U"] = index_list(res.U);
            py::dict f;
            for (const auto& [i, v] : res.f) f[py::int_(i)] = v;
            d["f"] = f;
            d["delta"] = res.delta;
            d["t_bound"] = tb.pass();
            return d;
        },
        py::arg("p"), py::arg("alpha"), py::arg("q"), py::arg("beta"));

    // search
    m.def(
        "analyze_x",
        [](unsigned l, std::uint64_t x, const std::string& ts) {
            const auto a = analyze_x(l, x, FactorBudget{}, ts);
            py::list out;
            for (const auto& r : a.records) out.append(record_dict(r));
            return out;
        },
        py::arg("l"), py::arg("x"), py::arg("ts") = "");
    m.def(
        "run_search",
        [](unsigned l, std::uint64_t lo, std::uint64_t hi, unsigned shards, const std::filesystem::path& out,
           bool resume) {
            SearchOptions o;
            o.l = l;
            o.lo = lo;
            o.hi = hi;
            o.shards = shards;
            o.out = out;
            o.resume = resume;
            SearchSummary s;
            {
                py::gil_scoped_release release;
                s = run_search(o);
            }
            py::dict d;
            d["interrupted"] = s.interrupted;
            d["records"] = s.records;
            d["skipped"] = s.skipped;
            d["ts"] = s.ts;
            d["out"] = s.out;
            d["log"] = s.log;
            return d;
        },
        py::arg("l"), py::arg("lo"), py::arg("hi"), py::arg("shards") = 1, py::arg("out"), py::arg("resume") = false);
    m.def("load_records", [](const std::filesystem::path& file) {
        py::list out;
        for (const auto& r : load_records(file)) out.append(record_dict(r));
        return out;
    });
}
