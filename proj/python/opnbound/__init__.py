"""Python access to the opnbound C++ core."""

import json

from . import _core
from ._core import (
    DomainError,
    InternalError,
    ResourceError,
    UndecidableError,
    abundancy_is_two,
    analyze_x,
    classical_r_bound,
    eq21_verify,
    factorize,
    fundamental_unit,
    half_factorization,
    half_values,
    is_certified_prime,
    is_probable_prime,
    lemma0_verdict,
    lemma1_divides,
    lemma3_largex_bounds,
    lemma3_ratio_check,
    lemma3_smallrange_verify,
    load_records,
    multiplicative_dependence,
    n_bound_exponents,
    partition,
    phi_eval,
    r_bound,
    root_count_mod,
    run_search,
    sigma_pp,
    xi_log_abs,
    zsigmondy_primitive_factor,
)


def bound_chain(l, precision_cap=None):
    """Certified bound chain for prime l >= 19, as a dict."""
    if precision_cap is None:
        return json.loads(_core.bound_chain(l))
    return json.loads(_core.bound_chain(l, precision_cap))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
