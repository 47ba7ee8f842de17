"""Dense truncated multivariate power series over the exact coefficient rings.

A ``TruncatedSeries`` keeps a dict from exponent tuples to coefficients
(``ExactComplex`` or ``NPoly``) together with an ordered variable tuple and a
truncation degree D.  Every operation is exact modulo truncation; operations
that genuinely lose orders (differentiation, division by a monomial) shrink
the recorded truncation degree so downstream certificates stay honest.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import EC_ZERO, ExactComplex, NPoly


class SeriesError(ArithmeticError):
    pass


def _coerce_coeff(c):
    if isinstance(c, (ExactComplex, NPoly)):
        return c
    return ExactComplex.coerce(c)


def _is_scalar(c):
    return isinstance(c, (int, Fraction, ExactComplex, NPoly))


class TruncatedSeries:
    __slots__ = ("variables", "degree", "coeffs")

    def __init__(self, variables, degree, coeffs=None):
        variables = tuple(variables)
        if degree < 0:
            raise SeriesError("truncation degree must be nonnegative")
        clean = {}
        for exps, c in (coeffs or {}).items():
            exps = tuple(exps)
            if len(exps) != len(variables):
                raise SeriesError(f"exponent {exps} does not match variables {variables}")
            if sum(exps) > degree:
                continue
            c = _coerce_coeff(c)
            if not c.is_zero():
                clean[exps] = c
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("TruncatedSeries is immutable")

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, variables, degree):
        return cls(variables, degree, {})

    @classmethod
    def const(cls, variables, degree, c):
        variables = tuple(variables)
        return cls(variables, degree, {(0,) * len(variables): _coerce_coeff(c)})

    @classmethod
    def var(cls, name, variables, degree):
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        if sum(exps) != 1:
            raise SeriesError(f"variable {name!r} not in {variables}")
        return cls(variables, degree, {exps: ExactComplex(1)})

    # -- inspection ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, exps):
        exps = tuple(exps)
        c = self.coeffs.get(exps)
        if c is not None:
            return c
        # keep the ring of the series if possible
        for v in self.coeffs.values():
            if isinstance(v, NPoly):
                return NPoly()
            break
        return EC_ZERO

    def constant_term(self):
        return self.coeff((0,) * len(self.variables))

    def order(self):
        """Least total degree present, or None for the zero series."""
        if not self.coeffs:
            return None
        return min(sum(e) for e in self.coeffs)

    def var_order(self, name):
        """Least exponent of one variable over the support, or None if zero."""
        idx = self.variables.index(name)
        if not self.coeffs:
            return None
        return min(e[idx] for e in self.coeffs)

    def min_term(self):
        """Lowest-order stored term as (exponents, coeff), grading by total
        degree then lexicographic order; None for the zero series."""
        if not self.coeffs:
            return None
        key = min(self.coeffs, key=lambda e: (sum(e), e))
        return key, self.coeffs[key]

    # -- structural conversions -------------------------------------------------
    def truncate(self, degree):
        """Forget orders above ``degree``; never extends the certified range."""
        if degree >= self.degree:
            return self
        return TruncatedSeries(self.variables, degree, self.coeffs)

    def with_degree(self, degree):
        """Declare a (possibly higher) truncation degree.  Only meaningful for
        exactly-known data such as polynomial generators; use with care."""
        return TruncatedSeries(self.variables, degree, self.coeffs)

    def embed(self, variables):
        """Reinterpret over a superset (or reordering) of the variables."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = []
        for v in self.variables:
            if v not in variables:
                raise SeriesError(f"cannot embed: variable {v!r} missing from {variables}")
            pos.append(variables.index(v))
        out = {}
        for exps, c in self.coeffs.items():
            new = [0] * len(variables)
            for p, e in zip(pos, exps):
                new[p] = e
            out[tuple(new)] = c
        return TruncatedSeries(variables, self.degree, out)

    def rename(self, mapping):
        return TruncatedSeries(tuple(mapping.get(v, v) for v in self.variables),
                               self.degree, self.coeffs)

    def drop_vars(self, names):
        """Remove variables that no stored term uses."""
        idxs = [self.variables.index(n) for n in names]
        for exps in self.coeffs:
            for i in idxs:
                if exps[i] != 0:
                    raise SeriesError(f"cannot drop live variable {self.variables[i]!r}")
        keep = [i for i in range(len(self.variables)) if i not in idxs]
        return TruncatedSeries(tuple(self.variables[i] for i in keep), self.degree,
                               {tuple(e[i] for i in keep): c for e, c in self.coeffs.items()})

    def map_coeffs(self, fn, degree=None):
        return TruncatedSeries(self.variables, self.degree if degree is None else degree,
                               {e: fn(c) for e, c in self.coeffs.items()})

    def lift_n(self):
        """Lift ExactComplex coefficients into the NPoly ring."""
        return self.map_coeffs(NPoly.coerce)

    def eval_n(self, n0):
        """Evaluate NPoly coefficients at an integer n0."""
        return self.map_coeffs(lambda c: c(n0) if isinstance(c, NPoly) else c)

    def conjugate(self, rename=None):
        """Coefficient-wise conjugation, optionally renaming variables
        (e.g. a series in z conjugates to a series in chi)."""
        out = self.map_coeffs(lambda c: c.conj())
        if rename:
            out = out.rename(rename)
        return out

    # -- arithmetic --------------------------------------------------------------
    def _aligned(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"expected TruncatedSeries, got {other!r}")
        degree = min(self.degree, other.degree)
        if self.variables == other.variables:
            a, b = self, other
        else:
            union = list(self.variables)
            for v in other.variables:
                if v not in union:
                    union.append(v)
            a, b = self.embed(tuple(union)), other.embed(tuple(union))
        return a, b, degree

    def __add__(self, other):
        if _is_scalar(other):
            other = TruncatedSeries.const(self.variables, self.degree, other)
        a, b, degree = self._aligned(other)
        out = dict(a.coeffs)
        for e, c in b.coeffs.items():
            cur = out.get(e)
            out[e] = c if cur is None else cur + c
        return TruncatedSeries(a.variables, degree, out)

    __radd__ = __add__

    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def __sub__(self, other):
        if _is_scalar(other):
            other = TruncatedSeries.const(self.variables, self.degree, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c0 = _coerce_coeff(other)
            return self.map_coeffs(lambda c: c * c0)
        a, b, degree = self._aligned(other)
        out = {}
        for e1, c1 in a.coeffs.items():
            d1 = sum(e1)
            for e2, c2 in b.coeffs.items():
                if d1 + sum(e2) > degree:
                    continue
                key = tuple(x + y for x, y in zip(e1, e2))
                c = c1 * c2
                cur = out.get(key)
                out[key] = c if cur is None else cur + c
        return TruncatedSeries(a.variables, degree, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise SeriesError("negative powers not supported; use divide")
        result = TruncatedSeries.const(self.variables, self.degree, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- calculus ----------------------------------------------------------------
    def differentiate(self, name, times=1):
        idx = self.variables.index(name)
        out = self
        for _ in range(times):
            nxt = {}
            for exps, c in out.coeffs.items():
                e = exps[idx]
                if e == 0:
                    continue
                key = exps[:idx] + (e - 1,) + exps[idx + 1:]
                nxt[key] = c * e
            out = TruncatedSeries(self.variables, max(out.degree - 1, 0), nxt)
        return out

    def jet_coeff(self, exps):
        """Derivative-at-zero convention: prod(e_i!) times the coefficient."""
        exps = tuple(exps)
        c = self.coeff(exps)
        fac = 1
        for e in exps:
            for j in range(2, e + 1):
                fac *= j
        return c * fac

    # -- substitution ------------------------------------------------------------
    def subs_one(self, name, repl):
        """Substitute one variable by a series with zero constant term."""
        if not repl.constant_term().is_zero():
            raise SeriesError(f"substitution for {name!r} has nonzero constant term")
        idx = self.variables.index(name)
        # group by the exponent of the substituted variable
        slices = {}
        for exps, c in self.coeffs.items():
            e = exps[idx]
            key = exps[:idx] + (0,) + exps[idx + 1:]
            slices.setdefault(e, {})[key] = c
        union = list(self.variables)
        for v in repl.variables:
            if v not in union:
                union.append(v)
        union = tuple(union)
        degree = min(self.degree, repl.degree)
        acc = TruncatedSeries.zero(union, degree)
        power = TruncatedSeries.const(union, degree, 1)
        repl = repl.embed(union).truncate(degree)
        last = 0
        for e in sorted(slices):
            for _ in range(e - last):
                power = power * repl
            last = e
            acc = acc + TruncatedSeries(self.variables, self.degree, slices[e]).embed(union) * power
        return acc

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        a, b, degree = self._aligned(other)
        keys = set(a.coeffs) | set(b.coeffs)
        for e in keys:
            if sum(e) > degree:
                continue
            if not (a.coeff(e) - b.coeff(e)).is_zero():
                return False
        return True

    def __repr__(self):
        if not self.coeffs:
            return f"<series 0 in {self.variables} deg<={self.degree}>"
        items = sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        parts = []
        for exps, c in items[:8]:
            mono = "*".join(f"{v}^{e}" for v, e in zip(self.variables, exps) if e)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        tail = " + ..." if len(items) > 8 else ""
        return f"<series {' + '.join(parts)}{tail} deg<={self.degree}>"


def compose(h: TruncatedSeries, args) -> TruncatedSeries:
    """Substitute a series (zero constant term) for every variable of h.

    ``args`` maps variable names of h to replacement series; the replacements
    are embedded over the union of their variable tuples.
    """
    if set(args) != set(h.variables):
        raise SeriesError(f"compose needs one argument per variable {h.variables}")
    union = []
    degree = h.degree
    for v in h.variables:
        a = args[v]
        if not a.constant_term().is_zero():
            raise SeriesError(f"compose argument for {v!r} has nonzero constant term")
        degree = min(degree, a.degree)
        for u in a.variables:
            if u not in union:
                union.append(u)
    union = tuple(union)
    embedded = {v: args[v].embed(union).truncate(degree) for v in h.variables}
    one = TruncatedSeries.const(union, degree, 1)
    powers = {v: [one] for v in h.variables}

    def power(v, e):
        tab = powers[v]
        while len(tab) <= e:
            tab.append(tab[-1] * embedded[v])
        return tab[e]

    acc = TruncatedSeries.zero(union, degree)
    for exps, c in sorted(h.coeffs.items(), key=lambda kv: sum(kv[0])):
        if sum(exps) > degree:
            continue
        term = None
        for v, e in zip(h.variables, exps):
            if e == 0:
                continue
            term = power(v, e) if term is None else term * power(v, e)
        if term is None:
            acc = acc + TruncatedSeries.const(union, degree, c)
        else:
            acc = acc + term * c
    return acc


def inverse_unit(a: TruncatedSeries) -> TruncatedSeries:
    """Inverse of a series whose constant term is a unit (geometric series)."""
    c0 = a.constant_term()
    if c0.is_zero():
        raise SeriesError("inverse_unit: constant term is zero")
    inv0 = c0.inverse()
    v = -((a - TruncatedSeries.const(a.variables, a.degree, c0)) * inv0)
    acc = TruncatedSeries.const(a.variables, a.degree, 1)
    term = acc
    for _ in range(a.degree):
        term = term * v
        if term.is_zero():
            break
        acc = acc + term
    return acc * inv0


def divide(num: TruncatedSeries, den: TruncatedSeries) -> TruncatedSeries:
    """Exact division when den = (monomial) * (unit).

    The result is certified to degree D - d where d is the monomial's total
    degree; failure of monomial divisibility raises with the offending term.
    """
    if den.is_zero():
        raise SeriesError("division by zero series")
    a, b, degree = num._aligned(den)
    nvars = len(a.variables)
    mins = [min(e[i] for e in b.coeffs) for i in range(nvars)]
    base = tuple(mins)
    if base not in b.coeffs:
        raise SeriesError(
            f"denominator is not monomial*unit: no term with exponents {base}")
    d = sum(base)
    shifted_den = {}
    for exps, c in b.coeffs.items():
        shifted_den[tuple(e - m for e, m in zip(exps, base))] = c
    shifted_num = {}
    for exps, c in a.coeffs.items():
        if any(e < m for e, m in zip(exps, base)):
            raise SeriesError(
                f"not divisible: term {dict(zip(a.variables, exps))} of the numerator "
                f"has lower order than the denominator monomial {dict(zip(a.variables, base))}")
        shifted_num[tuple(e - m for e, m in zip(exps, base))] = c
    new_degree = degree - d
    u = TruncatedSeries(a.variables, new_degree, shifted_den)
    q = TruncatedSeries(a.variables, new_degree, shifted_num)
    return q * inverse_unit(u)


def implicit_solve(rho: TruncatedSeries, wvar: str) -> TruncatedSeries:
    """Solve rho(w, x) = 0 for w = w(x) with w(0) = 0.

    Requires rho(0) = 0 and the pure-w-linear coefficient to be a unit; the
    solution is found by the contraction w -> w - rho(w, x)/c, which gains one
    correct order per pass.
    """
    if not rho.constant_term().is_zero():
        raise SeriesError("implicit function theorem hypothesis fails: rho(0) != 0")
    idx = rho.variables.index(wvar)
    lin = tuple(1 if i == idx else 0 for i in range(len(rho.variables)))
    c = rho.coeff(lin)
    if c.is_zero():
        raise SeriesError("implicit function theorem hypothesis fails: d rho/dw (0) is not a unit")
    cinv = c.inverse()
    rest = tuple(v for v in rho.variables if v != wvar)
    w = TruncatedSeries.zero(rest, rho.degree)
    for _ in range(rho.degree):
        residual = rho.subs_one(wvar, w.embed(rho.variables)).drop_vars((wvar,))
        if residual.is_zero():
            break
        w = w - residual.embed(rest) * cinv
    return w


def kth_root_unit(a: TruncatedSeries, k: int) -> TruncatedSeries:
    """The unique r with r(0) = 1 and r^k = a, for a(0) = 1 (binomial series)."""
    if k <= 0:
        raise SeriesError("root order must be positive")
    one = TruncatedSeries.const(a.variables, a.degree, 1)
    if not (a.constant_term() - _coerce_coeff(1)).is_zero():
        raise SeriesError("kth_root_unit requires constant term exactly 1")
    x = a - one
    acc = one
    term = one
    coeff = Fraction(1)
    alpha = Fraction(1, k)
    for j in range(1, a.degree + 1):
        term = term * x
        if term.is_zero():
            break
        coeff = coeff * (alpha - (j - 1)) / j
        acc = acc + term * coeff
    return acc
