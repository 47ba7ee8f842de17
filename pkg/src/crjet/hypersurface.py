"""Normal-form hypersurface ingestion, derived series, and invariants.

A hypersurface germ in C^2 is given in normal coordinates as

    Im w = Theta(z, zbar, Re w),    Theta(z,0,s) = Theta(0,chi,s) = 0,

with Theta a real truncated series in (z, chi, s).  From it we derive the
graph form w = Q(z, chi, tau), its 1-infinite-type factor S = Q/tau, the
slice theta = Theta_s(z,chi,0) with chi-components theta_j(z), and the
invariant tuple (m, r, L, K, T).
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import EC_I, ExactComplex, factorial
from .series import (SeriesError, TruncatedSeries, compose, divide,
                     implicit_solve, kth_root_unit)

THETA_VARS = ("z", "chi", "s")
ZC = ("z", "chi")


class ValidationError(ValueError):
    """Input rejected: not a valid in-scope normal-form hypersurface."""


class InvariantTuple:
    __slots__ = ("m", "r", "L", "K", "T", "certified_to_degree")

    def __init__(self, m, r, L, K, T, certified_to_degree):
        self.m = m
        self.r = r
        self.L = L
        self.K = K
        self.T = T
        self.certified_to_degree = certified_to_degree

    def as_dict(self):
        return {"m": self.m, "r": self.r, "L": self.L, "K": self.K, "T": self.T,
                "certified_to_degree": self.certified_to_degree}

    def __repr__(self):
        return (f"InvariantTuple(m={self.m}, r={self.r}, L={self.L}, K={self.K}, "
                f"T={self.T}, certified_to_degree={self.certified_to_degree})")


class Hypersurface:
    """Validated normal-form data plus everything derived from it."""

    def __init__(self, Theta, Q, S, theta, theta_components, invariants, degree):
        self.Theta = Theta
        self.Q = Q
        self.S = S
        self.theta = theta
        self.theta_components = theta_components
        self.invariants = invariants
        self.truncation_degree = degree

    # convenient views -----------------------------------------------------------
    def theta_j(self, j: int) -> TruncatedSeries:
        """theta_j(z) with theta(z,chi) = sum theta_j(z) chi^j / j!."""
        if j < len(self.theta_components):
            return self.theta_components[j]
        return TruncatedSeries.zero(("z",), max(self.theta.degree - j, 0))

    def S0(self) -> TruncatedSeries:
        """S(z,chi,0) as a series in (z,chi)."""
        return tau_slice(self.S, 0)

    def s_tau_jet(self, j: int) -> TruncatedSeries:
        """S_{tau^j}(z,chi,0) = j! * (tau^j slice of S)."""
        return tau_slice(self.S, j) * factorial(j)


def tau_slice(series: TruncatedSeries, j: int) -> TruncatedSeries:
    """Coefficient of tau^j as a series in the remaining variables."""
    idx = series.variables.index("tau")
    rest = tuple(v for v in series.variables if v != "tau")
    out = {}
    for exps, c in series.coeffs.items():
        if exps[idx] == j:
            out[tuple(e for i, e in enumerate(exps) if i != idx)] = c
    return TruncatedSeries(rest, max(series.degree - j, 0), out)


def s_slice(Theta: TruncatedSeries, c: int) -> TruncatedSeries:
    idx = Theta.variables.index("s")
    rest = tuple(v for v in Theta.variables if v != "s")
    out = {}
    for exps, coeff in Theta.coeffs.items():
        if exps[idx] == c:
            out[tuple(e for i, e in enumerate(exps) if i != idx)] = coeff
    return TruncatedSeries(rest, max(Theta.degree - c, 0), out)


def validate(Theta: TruncatedSeries, degree: int | None = None) -> Hypersurface:
    """Check normality/reality, derive Q and S, compute invariants."""
    if tuple(Theta.variables) != THETA_VARS:
        Theta = Theta.embed(THETA_VARS)
    if degree is not None:
        Theta = Theta.truncate(degree)
    D = Theta.degree

    if Theta.is_zero():
        raise ValidationError("flat: out of scope (Theta is identically zero)")

    # normality: no pure (z,s) or pure (chi,s) terms
    for exps, c in Theta.coeffs.items():
        a, b, _ = exps
        if a == 0 or b == 0:
            raise ValidationError(
                f"normality violation: term {dict(zip(THETA_VARS, exps))} has "
                f"coefficient {c}, but Theta(z,0,s) = Theta(0,chi,s) = 0 is required")

    # reality: coeff(z^a chi^b s^c) = conj(coeff(z^b chi^a s^c))
    for (a, b, c), coeff in Theta.coeffs.items():
        mirror = Theta.coeff((b, a, c))
        if not (coeff - mirror.conj()).is_zero():
            raise ValidationError(
                f"reality violation at exponents (z^{a} chi^{b} s^{c}) vs (z^{b} chi^{a} s^{c}): "
                f"{coeff} != conj({mirror})")

    # type: m = least s-order with a nonzero slice
    m = min(e[2] for e in Theta.coeffs)
    if m == 0:
        raise ValidationError("finite type: out of scope (Theta(z,chi,0) != 0)")

    # Q from (w - tau)/2i - Theta(z, chi, (w + tau)/2) = 0
    WV = ("w", "z", "chi", "tau")
    w = TruncatedSeries.var("w", WV, D)
    z = TruncatedSeries.var("z", WV, D)
    chi = TruncatedSeries.var("chi", WV, D)
    tau = TruncatedSeries.var("tau", WV, D)
    half = Fraction(1, 2)
    rho = (w - tau) * (EC_I.inverse() * half) - compose(
        Theta, {"z": z, "chi": chi, "s": (w + tau) * half})
    Q = implicit_solve(rho, "w").embed(("z", "chi", "tau"))
    S = divide(Q, TruncatedSeries.var("tau", ("z", "chi", "tau"), Q.degree))

    theta = s_slice(Theta, 1)  # Theta_s(z,chi,0); for m = 1 this is theta
    theta_components = _chi_components(theta)

    invariants = _invariants(Theta, theta, m, D)
    M = Hypersurface(Theta, Q, S, theta, theta_components, invariants, D)
    _cross_check(M)
    return M


def _chi_components(theta: TruncatedSeries) -> list[TruncatedSeries]:
    """theta_j(z) = j! * (chi^j slice of theta)."""
    zidx = theta.variables.index("z")
    cidx = theta.variables.index("chi")
    maxj = max((e[cidx] for e in theta.coeffs), default=-1)
    comps = []
    for j in range(maxj + 1):
        out = {}
        for exps, c in theta.coeffs.items():
            if exps[cidx] == j:
                out[(exps[zidx],)] = c * factorial(j)
        comps.append(TruncatedSeries(("z",), max(theta.degree - j, 0), out))
    return comps


def _invariants(Theta, theta, m, D) -> InvariantTuple:
    if m != 1:
        # in-scope inputs are 1-infinite type; higher m is reported, not analyzed
        return InvariantTuple(m, None, None, None, None, D)
    support = list(theta.coeffs)
    r = min(a + b for a, b in support)
    L = min(b for _, b in support)
    K = min(a for a, b in support if b == L)
    # T = 1 iff theta_{L+1}(z) has z-order >= K - 1
    T = 1
    for a, b in support:
        if b == L + 1 and a < K - 1:
            T = 0
            break
    return InvariantTuple(m, r, L, K, T, D)


def _cross_check(M: Hypersurface):
    """Independent characterizations of m and the S slices must agree."""
    inv = M.invariants
    Qtau = M.Q - TruncatedSeries.var("tau", M.Q.variables, M.Q.degree)
    m_from_q = Qtau.var_order("tau")
    if m_from_q is None:
        raise ValidationError("flat: out of scope (Q = tau identically)")
    if m_from_q != inv.m:
        raise ValidationError(
            f"inconsistent type: m={inv.m} from Theta but tau-order {m_from_q} of Q - tau")
    if inv.m == 1:
        # Q_tau(z,chi,0) = (1 + i theta)/(1 - i theta)
        # compare Q_tau(z,chi,0)*(1-i theta) with (1+i theta): avoids inversion
        one = TruncatedSeries.const(ZC, M.theta.degree, 1)
        lhs = tau_slice(M.Q, 1) * (one - M.theta * EC_I)
        if not (lhs - (one + M.theta * EC_I)).is_zero():
            raise ValidationError("S(z,chi,0) does not match (1+i theta)/(1-i theta)")
        # S_{chi^L}(z,0,0) = 2i theta_L(z)
        L = inv.L
        s0 = M.S0()
        slice_L = _chi_slice(s0, L) * factorial(L)
        if not (slice_L - M.theta_j(L) * (EC_I * 2)).is_zero():
            raise ValidationError("S_(chi^L)(z,0,0) != 2i theta_L(z)")


def _chi_slice(series: TruncatedSeries, j: int) -> TruncatedSeries:
    cidx = series.variables.index("chi")
    rest = tuple(v for v in series.variables if v != "chi")
    out = {}
    for exps, c in series.coeffs.items():
        if exps[cidx] == j:
            out[tuple(e for i, e in enumerate(exps) if i != cidx)] = c
    return TruncatedSeries(rest, max(series.degree - j, 0), out)


def compute_invariants(M: Hypersurface) -> InvariantTuple:
    return M.invariants


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------

def family_mc(c, j: int, degree: int) -> Hypersurface:
    """Theta = c * s * z^j chi^j  (Im w = c Re w |z|^(2j)), c rational != 0."""
    c = Fraction(c)
    if c == 0 or j < 1:
        raise ValidationError("family mc needs rational c != 0 and j >= 1")
    Theta = TruncatedSeries(THETA_VARS, degree, {(j, j, 1): ExactComplex(c)})
    return validate(Theta)


def family_nb(b, j: int, degree: int) -> Hypersurface:
    """theta = b z chi^j + conj(b) z^j chi  (Im w = 2 Re w Re(b z zbar^j))."""
    b = ExactComplex.coerce(b)
    if b.is_zero() or j < 1:
        raise ValidationError("family nb needs b != 0 and j >= 1")
    terms = {(1, j, 1): b}
    if j == 1:
        terms[(1, 1, 1)] = b + b.conj()   # the two displays coincide
    else:
        terms[(j, 1, 1)] = b.conj()
    if any(c.is_zero() for c in terms.values()):
        raise ValidationError("family nb with j = 1 needs Re b != 0")
    Theta = TruncatedSeries(THETA_VARS, degree, terms)
    return validate(Theta)


def family_b0(degree: int) -> Hypersurface:
    """theta = (1 - sqrt(1 - 4 z^2 chi^2)) / (2 z chi), Catalan coefficients."""
    one = TruncatedSeries.const(ZC, degree + 2, 1)
    z = TruncatedSeries.var("z", ZC, degree + 2)
    chi = TruncatedSeries.var("chi", ZC, degree + 2)
    root = kth_root_unit(one - (z * chi) ** 2 * 4, 2)
    theta = divide(one - root, z * chi * 2)
    Theta = TruncatedSeries(THETA_VARS, degree,
                            {(a, b, 1): c for (a, b), c in theta.coeffs.items()})
    return validate(Theta)
