"""The Upsilon family, jet-span dimensions, the exceptional set D, and jet order k.

For a validated 1-infinite-type hypersurface with slice invariants (L, K, T)
we build four series Upsilon^n_1..4 in (z, chi).  The parameter n is either a
fixed integer or left symbolic, in which case every coefficient is a
polynomial in n (NPoly).  The span V^n of the jet vectors

    upsilon^n_{s,t} = (Upsilon^n)_{z^s chi^t}(0, 0)  in C^4

has dimension < gamma := 2 + d1K + d1L*d1T exactly for n in the exceptional
set D, which is finite; the jet order k is read off from D.
"""

from __future__ import annotations

from .linalg import RankTracker
from .scalars import (EC_I, ExactComplex, NPoly, factorial, falling_binomial,
                      integer_roots, rising_binomial)
from .series import TruncatedSeries, divide, inverse_unit

ZC = ("z", "chi")

SYMBOLIC = "symbolic"


class UpsilonError(ArithmeticError):
    pass


def _delta1(x) -> int:
    return 1 if x == 1 else 0


class UpsilonFamily:
    __slots__ = ("n_mode", "components", "tilde3", "L", "K", "T")

    def __init__(self, n_mode, components, tilde3, L, K, T):
        self.n_mode = n_mode
        self.components = components
        self.tilde3 = tilde3
        self.L = L
        self.K = K
        self.T = T

    @property
    def degree(self) -> int:
        return min(c.degree for c in self.components)

    def eval_n(self, n0: int) -> "UpsilonFamily":
        """Specialize a symbolic family at an integer value of n."""
        if self.n_mode != SYMBOLIC:
            raise UpsilonError("eval_n requires a symbolic family")
        return UpsilonFamily(n0, [c.eval_n(n0) for c in self.components],
                             self.tilde3.eval_n(n0), self.L, self.K, self.T)


def pn_series(theta: TruncatedSeries, n_mode) -> TruncatedSeries:
    """((1 + i theta)/(1 - i theta))^n as a series in (z, chi).

    For symbolic n this is the product of the binomial expansions of
    (1 + i theta)^n and (1 - i theta)^(-n); theta has positive order, so only
    finitely many binomial terms survive the truncation.
    """
    it = theta * EC_I
    one = TruncatedSeries.const(theta.variables, theta.degree, 1)
    if n_mode != SYMBOLIC:
        n = int(n_mode)
        if n < 0:
            raise UpsilonError("n must be a nonnegative integer")
        base = (one + it) * inverse_unit(one - it)
        return base ** n
    ord_theta = theta.order()
    if ord_theta is None:
        raise UpsilonError("theta vanishes identically")
    kmax = theta.degree // ord_theta
    rising = one.map_coeffs(lambda c: c * NPoly.const(1))
    falling = rising
    power = one
    for k in range(1, kmax + 1):
        power = power * it
        falling = falling + power * falling_binomial(k)
        rising = rising + power * rising_binomial(k)
    return falling * rising


def build_upsilon(M, n_mode) -> UpsilonFamily:
    """Construct (Upsilon^n_1, ..., Upsilon^n_4) and the tilde variant of #3."""
    inv = M.invariants
    if inv.m != 1:
        raise UpsilonError("Upsilon family requires a 1-infinite-type hypersurface")
    L, K, T = inv.L, inv.K, inv.T
    theta = M.theta
    D = theta.degree

    if n_mode == SYMBOLIC:
        n_scalar = NPoly.n()
    else:
        n_scalar = ExactComplex.coerce(int(n_mode))
    two_i_n = n_scalar * (EC_I * 2)

    one = TruncatedSeries.const(ZC, D, 1)
    P = pn_series(theta, n_mode)
    theta_z = theta.differentiate("z")
    theta_chi = theta.differentiate("chi")
    one_plus_theta2 = one + theta * theta

    thL = M.theta_j(L)                       # series in z, order exactly K
    thL_prime = thL.differentiate("z")
    thL_bar = thL.conjugate(rename={"z": "chi"})
    thL_bar_prime = thL_bar.differentiate("chi")

    def emb(s):
        return s.embed(ZC)

    try:
        ratio_z = emb(divide(thL, thL_prime))          # theta_L / theta_L'
        ratio_chi = emb(divide(thL_bar, thL_bar_prime))
    except Exception as exc:
        raise UpsilonError(f"Upsilon construction: non-series quotient ({exc})") from exc

    U1 = ratio_z * P * theta_z * K - ratio_chi * theta_chi * L
    U2 = one_plus_theta2 * (P - one) - ratio_chi * theta_chi * two_i_n

    d1K, d1L, d1T = _delta1(K), _delta1(L), _delta1(T)
    alpha = thL.jet_coeff((K,))              # theta_L^(K)(0) != 0

    zero = TruncatedSeries.zero(ZC, D)
    if d1T:
        th1 = M.theta_j(1)
        th1_bar = th1.conjugate(rename={"z": "chi"})
        thL1 = M.theta_j(L + 1)
        thL1_bar = thL1.conjugate(rename={"z": "chi"})
        beta = thL1.jet_coeff((K - 1,))      # theta_{L+1}^(K-1)(0)
        c2 = (thL.jet_coeff((K,)) * thL1.jet_coeff((K,))
              - thL.jet_coeff((K + 1,)) * thL1.jet_coeff((K - 1,))) \
            * L * (alpha * alpha * K).inverse()
        if d1K:
            t1 = divide(theta_chi, thL_bar_prime.embed(ZC)) * th1.jet_coeff((L,))
        else:
            t1 = zero
        t2 = ratio_chi * theta_chi * c2
        q_L1_z = emb(divide(thL1, thL_prime))
        q_11_z = emb(divide(th1 * th1, thL_prime))
        q_L1_chi = emb(divide(thL1_bar, thL_bar_prime))
        q_11_chi = emb(divide(th1_bar * th1_bar, thL_bar_prime))
        t3 = -(P * (emb(th1) * one_plus_theta2
                    + (q_L1_z - q_11_z * two_i_n) * theta_z))
        t4 = (emb(th1_bar) * one_plus_theta2
              + (q_L1_chi + q_11_chi * two_i_n) * theta_chi) \
            * (beta * alpha.inverse())
        tilde3 = t1 + t2 + t3 + t4
    else:
        tilde3 = zero
    U3 = tilde3 * d1L

    if d1K:
        # K = 1 forces L = T = 1; theta_1' is a unit
        th1 = M.theta_j(1)
        th1_bar = th1.conjugate(rename={"z": "chi"})
        th1_prime = th1.differentiate("z")
        th1_bar_prime = th1_bar.differentiate("chi")
        a1 = th1.jet_coeff((1,))             # theta_1'(0) = alpha
        a2 = th1.jet_coeff((2,))             # theta_1''(0)
        inv_a1 = a1.inverse()
        U4 = (emb(th1_bar) * one_plus_theta2 * inv_a1
              - emb(divide(theta_z, th1_prime.embed(ZC))) * P
              + theta_chi * inv_a1
              * (emb(divide(th1_bar * th1_bar, th1_bar_prime)) * two_i_n
                 + emb(divide(M.theta_j(2).conjugate(rename={"z": "chi"}),
                              th1_bar_prime))
                 - emb(divide(th1_bar, th1_bar_prime)) * (a2 * inv_a1)))
    else:
        U4 = zero

    return UpsilonFamily(n_mode, [U1, U2, U3, U4], tilde3, L, K, T)


def jet_vectors(U: UpsilonFamily, s_max: int, t_max: int):
    """Matrix (s,t) -> 4-vector upsilon^n_{s,t}."""
    deg = U.degree
    if s_max + t_max > deg:
        raise UpsilonError(
            f"jet request (s,t) up to ({s_max},{t_max}) needs degree {s_max + t_max}, "
            f"family certified only to {deg}")
    out = {}
    for s in range(s_max + 1):
        for t in range(t_max + 1):
            if s + t > deg:
                continue
            out[(s, t)] = [c.jet_coeff((s, t)) for c in U.components]
    return out


def gamma_threshold(L: int, K: int, T: int) -> int:
    return 2 + _delta1(K) + _delta1(L) * _delta1(T)


def dim_Vn(U: UpsilonFamily, scan_bound: int):
    """(rank, pivot (s,t) list) of the jet vectors with s, t <= scan_bound."""
    if U.n_mode == SYMBOLIC:
        raise UpsilonError("dim_Vn requires a fixed-n family")
    tracker = RankTracker(4)
    deg = U.degree
    for total in range(0, 2 * scan_bound + 1):
        for s in range(max(0, total - scan_bound), min(total, scan_bound) + 1):
            t = total - s
            if s + t > deg:
                continue
            vec = [c.jet_coeff((s, t)) for c in U.components]
            tracker.add_row(vec, label=(s, t))
        if tracker.rank == 4:
            break
    return tracker.rank, list(tracker.labels)


def xi_rows(U: UpsilonFamily):
    """Rows upsilon_{2K,2L}, upsilon_{3K,3L}, upsilon_{3K,2L}, upsilon_{2K,3L}."""
    L, K = U.L, U.K
    idx = [(2 * K, 2 * L), (3 * K, 3 * L), (3 * K, 2 * L), (2 * K, 3 * L)]
    rows = []
    for (s, t) in idx:
        if s + t > U.degree:
            raise UpsilonError(
                f"xi matrix needs jets to order {s + t}, certified only to {U.degree}")
        rows.append([c.jet_coeff((s, t)) for c in U.components])
    return rows


def _det(rows) -> NPoly:
    size = len(rows)
    if size == 1:
        return NPoly.coerce(rows[0][0])
    acc = NPoly.const(0)
    sign = 1
    for j in range(size):
        minor = [[r[c] for c in range(size) if c != j] for r in rows[1:]]
        term = NPoly.coerce(rows[0][j]) * _det(minor)
        acc = acc + term if sign > 0 else acc - term
        sign = -sign
    return acc


def xi_determinants(U: UpsilonFamily):
    """det of the upper-left j x j submatrix of xi(n), j = 2, 3, 4, as NPoly."""
    if U.n_mode != SYMBOLIC:
        raise UpsilonError("xi_determinants requires a symbolic family")
    rows = xi_rows(U)
    return {j: _det([r[:j] for r in rows[:j]]) for j in (2, 3, 4)}


class JetAnalysis:
    __slots__ = ("gamma", "D", "k", "vn_dims", "certificates", "xi_dets",
                 "scan_bound")

    def __init__(self, gamma, D, k, vn_dims, certificates, xi_dets, scan_bound):
        self.gamma = gamma
        self.D = D
        self.k = k
        self.vn_dims = vn_dims
        self.certificates = certificates
        self.xi_dets = xi_dets
        self.scan_bound = scan_bound

    def as_dict(self):
        return {
            "gamma": self.gamma,
            "D": sorted(self.D),
            "k": self.k,
            "dims": {str(n): d for n, d in sorted(self.vn_dims.items())},
            "certificates": self.certificates,
            "scan_bound": self.scan_bound,
            "xi_dets": {str(j): str(p) for j, p in sorted(self.xi_dets.items())},
        }

    def __repr__(self):
        return f"JetAnalysis(gamma={self.gamma}, D={sorted(self.D)}, k={self.k})"


def compute_D(M, scan_bound: int | None = None) -> JetAnalysis:
    """Exceptional set D and jet order k.

    The symbolic determinant of the gamma x gamma corner of xi(n) restricts
    the candidates to its integer roots (plus 0, which always belongs); each
    candidate is then settled by an exact rank scan at that fixed n.
    """
    inv = M.invariants
    L, K, T = inv.L, inv.K, inv.T
    gamma = gamma_threshold(L, K, T)
    if scan_bound is None:
        scan_bound = 3 * K + 3 * L + 2

    U = build_upsilon(M, SYMBOLIC)
    dets = xi_determinants(U)
    det_gamma = dets[gamma]
    if det_gamma.is_zero():
        raise UpsilonError(
            "corner determinant vanishes identically; truncation too small or "
            "input outside the analyzed cases")
    candidates = {r for r in integer_roots(det_gamma) if r >= 0}
    candidates.add(0)

    D, vn_dims, certificates = [], {}, {}
    for n0 in sorted(candidates):
        Un = U.eval_n(n0)
        rank, pivots = dim_Vn(Un, scan_bound)
        vn_dims[n0] = rank
        if rank < gamma:
            D.append(n0)
            certificates[n0] = {"status": "in D, certified to scan bound",
                                "rank": rank, "scan_bound": scan_bound}
        else:
            certificates[n0] = {"status": "excluded, rank certificate",
                                "rank": rank,
                                "pivots": [list(p) for p in pivots[:gamma]]}

    if 0 not in D:
        raise UpsilonError("0 must belong to D; rank scan disagrees (bug)")
    if len(D) > 2 * gamma:
        raise UpsilonError(
            f"|D| = {len(D)} exceeds the bound {2 * gamma}; implementation bug")

    if D == [0]:
        k = 1
    else:
        k = 1 + _delta1(K) + max(D)
    return JetAnalysis(gamma, D, k, vn_dims, certificates, dets, scan_bound)
