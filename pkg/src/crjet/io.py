"""JSON (de)serialization for series, hypersurfaces, maps, jets, and reports.

All rational numbers travel as strings "p/q" (or "p") so payloads stay exact
and byte-stable.  Series objects carry their variables and truncation degree
explicitly; a reader never has to guess whether an absent monomial is zero or
merely beyond the certified order.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .equivalence import FormalMap, JetData
from .hypersurface import THETA_VARS, Hypersurface, ValidationError, validate
from .scalars import ExactComplex, NPoly
from .series import TruncatedSeries


class FormatError(ValueError):
    pass


# -- rationals ---------------------------------------------------------------

def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, bool):
        raise FormatError(f"expected a rational, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad rational {s!r}: {exc}") from None
    raise FormatError(f"expected a rational string, got {type(s).__name__}")


def complex_dict(c: ExactComplex) -> dict:
    return {"re": frac_str(c.re), "im": frac_str(c.im)}


def parse_complex(obj) -> ExactComplex:
    if not isinstance(obj, dict):
        raise FormatError(f"expected {{re, im}}, got {type(obj).__name__}")
    return ExactComplex(parse_frac(obj.get("re", 0)), parse_frac(obj.get("im", 0)))


def npoly_dict(p: NPoly) -> dict:
    return {"n_coeffs": [complex_dict(c) for c in p.coefficients]}


# -- series ------------------------------------------------------------------

def series_dict(s: TruncatedSeries) -> dict:
    terms = []
    for exps in sorted(s.coeffs):
        c = s.coeffs[exps]
        entry = {"exponents": list(exps)}
        if isinstance(c, NPoly):
            entry.update(npoly_dict(c))
        else:
            entry.update(complex_dict(ExactComplex.coerce(c)))
        terms.append(entry)
    return {"variables": list(s.variables),
            "truncation_degree": s.degree,
            "terms": terms}


def parse_series(obj, expect_variables=None) -> TruncatedSeries:
    if not isinstance(obj, dict):
        raise FormatError("series must be a JSON object")
    try:
        variables = tuple(obj["variables"])
        degree = int(obj["truncation_degree"])
        raw_terms = obj["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"series object malformed: {exc}") from None
    if expect_variables is not None and variables != tuple(expect_variables):
        raise FormatError(
            f"expected variables {list(expect_variables)}, got {list(variables)}")
    if degree < 0:
        raise FormatError("truncation_degree must be nonnegative")
    coeffs = {}
    for i, term in enumerate(raw_terms):
        if not isinstance(term, dict) or "exponents" not in term:
            raise FormatError(f"term #{i}: missing exponents")
        exps = tuple(term["exponents"])
        if len(exps) != len(variables) or any(
                not isinstance(e, int) or e < 0 for e in exps):
            raise FormatError(f"term #{i}: bad exponents {list(exps)}")
        if "n_coeffs" in term:
            c = NPoly([parse_complex(x) for x in term["n_coeffs"]])
        else:
            c = ExactComplex(parse_frac(term.get("re", 0)),
                             parse_frac(term.get("im", 0)))
        if exps in coeffs:
            raise FormatError(f"term #{i}: duplicate exponents {list(exps)}")
        if sum(exps) <= degree and not c.is_zero():
            coeffs[exps] = c
    return TruncatedSeries(variables, degree, coeffs)


# -- hypersurfaces -----------------------------------------------------------

def hypersurface_dict(M: Hypersurface) -> dict:
    return series_dict(M.Theta)


def parse_hypersurface(obj, degree=None) -> Hypersurface:
    Theta = parse_series(obj, expect_variables=THETA_VARS)
    if degree is not None and degree < Theta.degree:
        Theta = Theta.truncate(degree)
    return validate(Theta)


# -- formal maps -------------------------------------------------------------

def formal_map_dict(H: FormalMap) -> dict:
    return {"order": H.order,
            "f": [series_dict(s) for s in H.f_components],
            "g": [series_dict(s) for s in H.g_components]}


def parse_formal_map(obj) -> FormalMap:
    if not isinstance(obj, dict) or "f" not in obj or "g" not in obj:
        raise FormatError("formal map must be an object with f and g lists")
    f = [parse_series(s, expect_variables=("z",)) for s in obj["f"]]
    g = [parse_series(s, expect_variables=("z",)) for s in obj["g"]]
    return FormalMap(f, g)


# -- jets --------------------------------------------------------------------

def jet_data_dict(jet: JetData) -> dict:
    return {"a01": complex_dict(jet.a01),
            "b00": complex_dict(jet.b00),
            "delta": complex_dict(jet.delta),
            "mu_sq": frac_str(jet.mu_sq),
            "lambdas": {str(n): [complex_dict(c) for c in tup]
                        for n, tup in sorted(jet.lambdas.items())}}


def parse_jet_data(obj) -> JetData:
    if not isinstance(obj, dict) or "a01" not in obj or "b00" not in obj:
        raise FormatError("jet data must be an object with a01 and b00")
    lambdas = {}
    for key, tup in (obj.get("lambdas") or {}).items():
        try:
            n = int(key)
        except ValueError:
            raise FormatError(f"lambda key {key!r} is not an integer") from None
        if not isinstance(tup, list) or len(tup) != 4:
            raise FormatError(f"lambdas[{key}] must be a list of 4 complex values")
        lambdas[n] = tuple(parse_complex(c) for c in tup)
    return JetData(parse_complex(obj["a01"]), parse_complex(obj["b00"]), lambdas)


# -- top level ---------------------------------------------------------------

def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from None


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
