"""Formal equivalences: verification, jet data, and reconstruction from jets.

A formal map between 1-infinite-type hypersurfaces in normal coordinates has
the shape H = (f(z,w), w*g(z,w)) with f_z(0,0)*g(0,0) != 0.  Writing
f = sum f_n(z) w^n/n! and g likewise, the mapping identity

    S(z,chi,tau) g(z, tau S) = gbar(chi,tau) Shat(f(z,tau S), fbar(chi,tau), tau gbar)

determines (f_n, g_n) order by order from the k-jet of H: at each n the
identity is affine in the four scalars (a_n^0, b_n^0, a_n^1, b_n^L), so the
order-n equation is solved exactly over the rationals; for n in the
exceptional set D the scalars are free and must be supplied as jet data.
"""

from __future__ import annotations

from fractions import Fraction

from .faadibruno import PnData, universal_pn
from .hypersurface import Hypersurface, tau_slice
from .linalg import InconsistentSystem, solve_rational
from .scalars import EC_I, ExactComplex, factorial, rational_nth_root
from .series import (SeriesError, TruncatedSeries, compose, divide,
                     implicit_solve, inverse_unit, kth_root_unit)
from .upsilon import compute_D

ZC = ("z", "chi")


class EquivalenceError(ArithmeticError):
    pass


class JetRealizationError(EquivalenceError):
    pass


class FormalMap:
    """H = (f(z,w), w*g(z,w)) stored through the components f_n, g_n."""

    def __init__(self, f_components, g_components):
        if not f_components or not g_components:
            raise EquivalenceError("a formal map needs at least the order-0 components")
        self.f_components = [s.embed(("z",)) for s in f_components]
        self.g_components = [s.embed(("z",)) for s in g_components]
        f0, g0 = self.f_components[0], self.g_components[0]
        if not f0.coeff((0,)).is_zero():
            raise EquivalenceError("f(0,0) must vanish")
        if f0.coeff((1,)).is_zero() or g0.coeff((0,)).is_zero():
            raise EquivalenceError("invertibility requires f_z(0,0) != 0 and g(0,0) != 0")

    @property
    def order(self) -> int:
        return min(len(self.f_components), len(self.g_components)) - 1

    # -- jets -------------------------------------------------------------------
    def a(self, n: int, k: int) -> ExactComplex:
        """a_n^k, i.e. conj of the k-th derivative of f_n at 0."""
        return self.f_components[n].jet_coeff((k,)).conj()

    def b(self, n: int, k: int) -> ExactComplex:
        return self.g_components[n].jet_coeff((k,)).conj()

    def jet(self, k: int):
        """The k-jet: coefficients of z^a w^b, a+b <= k, of both components."""
        out = {}
        for comp, parts in (("f", self.f_components), ("g", self.g_components)):
            for b, series in enumerate(parts):
                wexp = b + (1 if comp == "g" else 0)  # G = w*g
                if wexp > k:
                    continue
                for a in range(k - wexp + 1):
                    c = series.coeff((a,)) * Fraction(1, factorial(b))
                    if not c.is_zero():
                        out[(comp, a, wexp)] = c
        return out

    def as_two_variable(self, degree: int):
        """(f(z,w), g(z,w)) as series in (z, w)."""
        fd, gd = {}, {}
        for n, s in enumerate(self.f_components):
            for (k,), c in s.coeffs.items():
                fd[(k, n)] = c * Fraction(1, factorial(n))
        for n, s in enumerate(self.g_components):
            for (k,), c in s.coeffs.items():
                gd[(k, n)] = c * Fraction(1, factorial(n))
        return (TruncatedSeries(("z", "w"), degree, fd),
                TruncatedSeries(("z", "w"), degree, gd))

    def conjugate_components(self):
        fbar = [s.conjugate(rename={"z": "chi"}) for s in self.f_components]
        gbar = [s.conjugate(rename={"z": "chi"}) for s in self.g_components]
        return fbar, gbar

    def __eq__(self, other):
        if not isinstance(other, FormalMap):
            return NotImplemented
        n = min(self.order, other.order)
        return (all(self.f_components[j] == other.f_components[j] for j in range(n + 1))
                and all(self.g_components[j] == other.g_components[j] for j in range(n + 1)))

    def __repr__(self):
        return f"FormalMap(order={self.order})"


class JetData:
    """The k-jet content driving reconstruction.

    a01, b00 pin the 1-jet; lambdas[n] = (a_n^0, b_n^0, a_n^1, b_n^L) for the
    exceptional orders n in D.
    """

    def __init__(self, a01, b00, lambdas=None):
        self.a01 = ExactComplex.coerce(a01)
        self.b00 = ExactComplex.coerce(b00)
        if self.a01.is_zero() or self.b00.is_zero():
            raise EquivalenceError("jet data requires a_0^1 != 0 and b_0^0 != 0")
        if not self.b00.is_real():
            raise EquivalenceError("b_0^0 must be real for an equivalence")
        self.lambdas = {int(n): tuple(ExactComplex.coerce(c) for c in tup)
                        for n, tup in (lambdas or {}).items()}

    @property
    def delta(self) -> ExactComplex:
        return (self.a01 * self.b00).inverse()

    @property
    def mu_sq(self) -> Fraction:
        return self.a01.norm_sq()


def extract_jet(H: FormalMap, D) -> JetData:
    """Read the reconstruction data of H for exceptional set D."""
    lambdas = {}
    for n in D:
        if n == 0:
            continue
        if n <= H.order:
            lambdas[n] = (H.a(n, 0), H.b(n, 0), H.a(n, 1), H.b(n, 1))
        else:
            lambdas[n] = (ExactComplex(0),) * 4
    return JetData(H.a(0, 1), H.b(0, 0), lambdas)


class ResidualReport:
    def __init__(self, residual: TruncatedSeries):
        self.residual = residual
        self.is_zero = residual.is_zero()
        self.first_offending = None if self.is_zero else residual.min_term()
        self.certified_to_degree = residual.degree

    def __repr__(self):
        if self.is_zero:
            return f"ResidualReport(zero to degree {self.certified_to_degree})"
        exps, c = self.first_offending
        return (f"ResidualReport(nonzero; first offending monomial "
                f"{dict(zip(self.residual.variables, exps))} -> {c})")


def verify_map(M: Hypersurface, Mhat: Hypersurface, H: FormalMap,
               order: int | None = None) -> ResidualReport:
    """Residual of Q g(z,Q) - Qhat(f(z,Q), fbar(chi,tau), tau gbar(chi,tau))."""
    degree = min(M.Q.degree, Mhat.Q.degree)
    if order is not None:
        degree = min(degree, order)
    V3 = ("z", "chi", "tau")
    Q = M.Q.truncate(degree)
    fzw, gzw = H.as_two_variable(degree)
    fbar, gbar = H.conjugate_components()
    fbd, gbd = {}, {}
    for n, s in enumerate(fbar):
        for (k,), c in s.coeffs.items():
            fbd[(k, n)] = c * Fraction(1, factorial(n))
    for n, s in enumerate(gbar):
        for (k,), c in s.coeffs.items():
            gbd[(k, n)] = c * Fraction(1, factorial(n))
    fbar2 = TruncatedSeries(("chi", "t"), degree, fbd)
    gbar2 = TruncatedSeries(("chi", "t"), degree, gbd)

    z = TruncatedSeries.var("z", V3, degree)
    chi = TruncatedSeries.var("chi", V3, degree)
    tau = TruncatedSeries.var("tau", V3, degree)
    g_at = compose(gzw, {"z": z, "w": Q})
    f_at = compose(fzw, {"z": z, "w": Q})
    fb_at = compose(fbar2, {"chi": chi, "t": tau})
    gb_at = compose(gbar2, {"chi": chi, "t": tau})
    Qhat_at = compose(Mhat.Q.truncate(degree),
                      {"z": f_at, "chi": fb_at, "tau": tau * gb_at})
    return ResidualReport(Q * g_at - Qhat_at)


# ---------------------------------------------------------------------------
# f0 from the 1-jet
# ---------------------------------------------------------------------------

def forced_mu_sq(M: Hypersurface, Mhat: Hypersurface) -> Fraction:
    """The forced squared modulus of a_0^1 for any equivalence M -> Mhat."""
    inv, invh = M.invariants, Mhat.invariants
    if (inv.L, inv.K) != (invh.L, invh.K):
        raise JetRealizationError(
            f"invariants differ: (L,K)={(inv.L, inv.K)} vs {(invh.L, invh.K)}; "
            "no equivalence exists")
    L, K = inv.L, inv.K
    alpha = M.theta_j(L).jet_coeff((K,))
    alphahat = Mhat.theta_j(L).jet_coeff((K,))
    ratio = alpha.norm_sq() / alphahat.norm_sq()
    mu_sq = rational_nth_root(ratio, L + K)
    if mu_sq is None:
        raise JetRealizationError(
            "target pair requires algebraic extension: out of scope "
            f"(|alpha/alphahat|^2 = {ratio} has no rational {L + K}-th root)")
    return mu_sq


def f0_from_jet(M: Hypersurface, Mhat: Hypersurface, a01) -> tuple[TruncatedSeries, Fraction]:
    """The order-0 component f_0(z) = U(z, z/a_0^1), plus mu^2 = |a_0^1|^2."""
    a01 = ExactComplex.coerce(a01)
    mu_sq = forced_mu_sq(M, Mhat)
    if a01.norm_sq() != mu_sq:
        raise JetRealizationError(
            f"modulus forced by the invariant ratio: need |a_0^1|^2 = {mu_sq}, "
            f"got {a01.norm_sq()}")
    L, K = M.invariants.L, M.invariants.K
    thL = M.theta_j(L)
    thLhat = Mhat.theta_j(L)
    alpha = thL.jet_coeff((K,))
    alphahat = thLhat.jet_coeff((K,))

    def unit_root(th, const):
        mono = TruncatedSeries(("z",), th.degree, {(K,): const * Fraction(1, factorial(K))})
        return kth_root_unit(divide(th, mono), K)

    u = unit_root(thL, alpha)             # theta_L = alpha z^K u(z)^K / K!
    uhat = unit_root(thLhat, alphahat).rename({"z": "zh"})

    deg = min(u.degree, uhat.degree) + 1
    VI = ("zh", "X", "Y")
    zh = TruncatedSeries.var("zh", VI, deg)
    X = TruncatedSeries.var("X", VI, deg)
    Y = TruncatedSeries.var("Y", VI, deg)
    iota = zh * compose(uhat, {"zh": zh}) - Y * compose(u, {"z": X}) * mu_sq
    U = implicit_solve(iota, "zh")        # U(X, Y)
    zser = TruncatedSeries.var("z", ("z",), U.degree)
    f0 = compose(U, {"X": zser, "Y": zser * a01.inverse()})

    # postcondition: theta(z,chi) = thetahat(f0(z), conj f0(chi))
    f0zc = f0.embed(ZC)
    f0bar = f0.conjugate(rename={"z": "chi"}).embed(ZC)
    pushed = compose(Mhat.theta.truncate(f0.degree), {"z": f0zc, "chi": f0bar})
    if not (pushed - M.theta.truncate(pushed.degree)).is_zero():
        raise JetRealizationError(
            "jet not realizable: theta does not match thetahat(f0, conj f0)")
    return f0, mu_sq


# ---------------------------------------------------------------------------
# order-by-order reconstruction
# ---------------------------------------------------------------------------

def shat_jet_table(Mhat, f0, n_max):
    """(j,k,l) -> Shat_{z^j chi^k tau^l}(f0(z), conj f0(chi), 0) for j+k+l <= n_max."""
    f0zc = f0.embed(ZC)
    f0bar = f0.conjugate(rename={"z": "chi"}).embed(ZC)
    table = {}
    for j in range(n_max + 1):
        dz = Mhat.S.differentiate("z", j)
        for k in range(n_max + 1 - j):
            dzk = dz.differentiate("chi", k)
            for l in range(n_max + 1 - j - k):
                d = dzk.differentiate("tau", l)
                table[(j, k, l)] = compose(tau_slice(d, 0),
                                           {"z": f0zc, "chi": f0bar})
    return table


def _z_slice(series_zc: TruncatedSeries, j: int) -> TruncatedSeries:
    """j! times the chi^j coefficient, as a series in z."""
    zi = series_zc.variables.index("z")
    ci = series_zc.variables.index("chi")
    out = {}
    for exps, c in series_zc.coeffs.items():
        if exps[ci] == j:
            out[(exps[zi],)] = c * factorial(j)
    return TruncatedSeries(("z",), max(series_zc.degree - j, 0), out)


class _OrderSolver:
    """The order-n step: affine dependence on x = (a_n^0, b_n^0, a_n^1, b_n^L)."""

    def __init__(self, M, n, Rn, f0, b00, a01, a02, shat):
        inv = M.invariants
        self.L, self.K = inv.L, inv.K
        self.n = n
        self.Rn = Rn
        self.b00 = b00
        self.a01 = a01
        self.a02 = a02
        self.theta1 = M.theta_j(1)
        self.thetaL = M.theta_j(self.L)
        self.thetaL1 = M.theta_j(self.L + 1)
        self.thetaL_prime = self.thetaL.differentiate("z")
        self.f0_prime = f0.differentiate("z")
        self.S0 = M.S0()
        self.shat = shat
        self.Rn_chi0 = _z_slice(Rn, 0)
        self.RnL = _z_slice(Rn, self.L)

    def run(self, a_n0, b_n0, a_n1, b_nL):
        """Candidate (f_n, g_n) plus all order-n constraint values."""
        L, K, n = self.L, self.K, self.n
        b00, a01, a02 = self.b00, self.a01, self.a02
        two_i = EC_I * 2
        one_z = TruncatedSeries.const(("z",), self.RnL.degree, 1)

        g_n = self.Rn_chi0 + one_z * b_n0 + self.theta1 * (two_i * b00 * a01.inverse() * a_n0)

        d1L = 1 if L == 1 else 0
        h1 = (a_n1 * a01 - a_n0 * a02) * (a01 * a01).inverse()
        E = (self.RnL
             + self.thetaL * g_n * (two_i * (n + 1))
             - one_z * b_nL
             - self.thetaL * (two_i * b_n0)
             - self.thetaL * (two_i * L * b00 * h1)
             - (self.thetaL1 * two_i - self.theta1 * self.theta1 * (4 * d1L))
             * (b00 * a_n0 * a01.inverse()))
        rhs_f = E * (two_i * b00).inverse()

        # divisibility by theta_L' needs z-order >= K-1: peel the low part
        low = []
        peeled = rhs_f
        for j in range(K - 1):
            c = rhs_f.coeff((j,))
            low.append(c)
            if not c.is_zero():
                peeled = peeled - TruncatedSeries(("z",), rhs_f.degree, {(j,): c})
        F = divide(peeled, self.thetaL_prime)      # f_n / f_0'
        f_n = self.f0_prime * F

        fbar_n = f_n.conjugate(rename={"z": "chi"}).embed(ZC)
        gbar_n = g_n.conjugate(rename={"z": "chi"}).embed(ZC)
        resid = (-(self.S0 ** (n + 1)) * g_n.embed(ZC)
                 + self.shat[(0, 0, 0)] * gbar_n
                 + self.shat[(1, 0, 0)] * (self.S0 ** n) * f_n.embed(ZC) * b00
                 + self.shat[(0, 1, 0)] * fbar_n * b00
                 - self.Rn)

        # self-consistency of the probed scalars with the candidate's jets
        consistency = [
            f_n.coeff((0,)) - a_n0.conj(),
            f_n.jet_coeff((1,)) - a_n1.conj(),
            g_n.coeff((0,)) - b_n0.conj(),
            g_n.jet_coeff((L,)) - b_nL.conj(),
        ]
        return f_n, g_n, resid, low, consistency


def _constraint_vector(resid, low, consistency, keys):
    vals = []
    for key in keys:
        vals.append(resid.coeff(key))
    vals.extend(low)
    vals.extend(consistency)
    out = []
    for v in vals:
        v = ExactComplex.coerce(v)
        out.append(v.re)
        out.append(v.im)
    return out


def reconstruct(M: Hypersurface, Mhat: Hypersurface, jet: JetData,
                order: int, D=None) -> FormalMap:
    """Rebuild an equivalence M -> Mhat from its jet data, to w-order `order`.

    For n not in D the order-n scalars are forced: the mapping identity at
    order n, together with divisibility and jet self-consistency, gives an
    exact linear system with a unique solution.  For n in D the jet supplies
    them and the same system checks realizability.
    """
    if D is None:
        D = compute_D(M).D
    f0, _ = f0_from_jet(M, Mhat, jet.a01)
    b00 = jet.b00
    a01 = jet.a01
    a02 = f0.jet_coeff((2,)).conj()
    g0 = TruncatedSeries(("z",), f0.degree, {(0,): b00})

    f_parts = [f0]
    g_parts = [g0]
    shat = shat_jet_table(Mhat, f0, order)
    if not (shat[(0, 0, 0)] - M.S0().truncate(shat[(0, 0, 0)].degree)).is_zero():
        raise JetRealizationError("Shat(f0, conj f0, 0) != S(z,chi,0): jet not realizable")
    s_jets = [M.s_tau_jet(j) for j in range(order + 1)]

    zero4 = tuple(ExactComplex(0) for _ in range(4))
    for n in range(1, order + 1):
        fbar = [s.conjugate(rename={"z": "chi"}) for s in f_parts]
        gbar = [s.conjugate(rename={"z": "chi"}) for s in g_parts]
        Rn = universal_pn(n, PnData(f_parts, g_parts, fbar, gbar,
                                    s_jets[:n + 1], shat))
        solver = _OrderSolver(M, n, Rn, f0, b00, a01, a02, shat)

        probes = [zero4]
        for j in range(4):
            for unit in (ExactComplex(1), EC_I):
                x = list(zero4)
                x[j] = unit
                probes.append(tuple(x))
        outs = [solver.run(*x) for x in probes]

        keys = set()
        for _, _, resid, _, _ in outs:
            keys.update(resid.coeffs)
        keys = sorted(keys)
        base = _constraint_vector(outs[0][2], outs[0][3], outs[0][4], keys)
        cols = [_constraint_vector(o[2], o[3], o[4], keys) for o in outs[1:]]
        rows = []
        rhs = []
        for r in range(len(base)):
            rows.append([cols[c][r] - base[r] for c in range(8)])
            rhs.append(-base[r])
        if n in D:
            pin = jet.lambdas.get(n, zero4)
            for j, val in enumerate(pin):
                val = ExactComplex.coerce(val)
                for part, target in ((0, val.re), (1, val.im)):
                    row = [Fraction(0)] * 8
                    row[2 * j + part] = Fraction(1)
                    rows.append(row)
                    rhs.append(target)
        try:
            sol, free = solve_rational(rows, rhs)
        except InconsistentSystem as exc:
            raise JetRealizationError(
                f"jet not realizable: order-{n} system inconsistent") from exc
        if free:
            if n in D:
                raise JetRealizationError(
                    f"order-{n} system underdetermined despite jet pins (bug)")
            raise EquivalenceError(
                f"order-{n} scalars not forced although {n} is not in D: the "
                f"order-{n} identity is only certified to degree "
                f"{outs[0][2].degree}, which can starve the rank; rebuild the "
                "hypersurfaces with a larger truncation degree "
                f"(free directions {free})")
        x = tuple(ExactComplex(sol[2 * j], sol[2 * j + 1]) for j in range(4))
        f_n, g_n, resid, low, consistency = solver.run(*x)
        if (not resid.is_zero() or any(not ExactComplex.coerce(c).is_zero() for c in low)
                or any(not c.is_zero() for c in consistency)):
            raise JetRealizationError(
                f"jet not realizable: order-{n} identity fails after solving")
        f_parts.append(f_n)
        g_parts.append(g_n)
    return FormalMap(f_parts, g_parts)


def finite_determination_check(M, Mhat, H1: FormalMap, H2: FormalMap, k: int):
    """Two verified equivalences with equal k-jets must agree entirely."""
    r1 = verify_map(M, Mhat, H1)
    r2 = verify_map(M, Mhat, H2)
    if not r1.is_zero or not r2.is_zero:
        return {"status": "precondition", "reason": "a map fails verification",
                "residuals": (r1, r2)}
    if H1.jet(k) != H2.jet(k):
        return {"status": "precondition", "reason": f"{k}-jets differ"}
    order = min(H1.order, H2.order)
    for n in range(order + 1):
        for tag, s1, s2 in (("f", H1.f_components[n], H2.f_components[n]),
                            ("g", H1.g_components[n], H2.g_components[n])):
            d = s1 - s2
            if not d.is_zero():
                return {"status": "fail", "component": (tag, n),
                        "first_difference": d.min_term()}
    return {"status": "equal", "order": order}


def compose_maps(H: FormalMap, A: FormalMap, degree: int) -> FormalMap:
    """H after A, as a formal map (both in (f, w g) shape)."""
    fH, gH = H.as_two_variable(degree)
    fA, gA = A.as_two_variable(degree)
    z = TruncatedSeries.var("z", ("z", "w"), degree)
    w = TruncatedSeries.var("w", ("z", "w"), degree)
    inner_w = w * gA
    first = compose(fH, {"z": fA, "w": inner_w})
    second = gA * compose(gH, {"z": fA, "w": inner_w})
    # back to components: n-th tau-jet in w
    def comps(series):
        wi = series.variables.index("w")
        zi = series.variables.index("z")
        nmax = max((e[wi] for e in series.coeffs), default=0)
        out = []
        for nn in range(nmax + 1):
            d = {}
            for exps, c in series.coeffs.items():
                if exps[wi] == nn:
                    d[(exps[zi],)] = c * factorial(nn)
            out.append(TruncatedSeries(("z",), max(series.degree - nn, 0), d))
        return out
    return FormalMap(comps(first), comps(second))
