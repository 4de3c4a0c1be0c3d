"""The field-of-norms side: k((Y)) and its finite-depth perfection.

Units g of O_F act on series over k by substituting the mod-pi
reduction of [g]; the depth-m perfection consists of series in
Z = Y^(1/q^m).  Since the residue field is F_q, the q-power Frobenius
fixes coefficients, so raising to the q-th power and extracting q-th
roots only move exponents around.

Composition predicates (separable / invertible / nontorsion), the
Weierstrass-degree analysis of commuting pairs, and the computable
witnesses for the non-existence of equivariant Frobenius traces live
here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (BadGamma, BaseFieldIsQp, CommutationFails, NotAUnit,
                     NonzeroConstantTerm, NotSeparable, TorsionGamma, TorsionW,
                     WrongCoordinate)
from .padic import FqElement, OFElement
from .series import FqDomain, TruncSeries, frobenius_twist, series_powers

_LUBNARCH_ELL_CAP = 20


class GammaElement:
    """A Galois element represented by its character value: a unit g of
    O_F standing for the gamma with chi_pi(gamma) = g."""

    __slots__ = ("spec", "value")

    def __init__(self, value):
        if value.val_pi() != 0:
            raise NotAUnit("chi_pi(gamma) must be a unit of O_F")
        self.spec = value.spec
        self.value = value

    @classmethod
    def from_int(cls, spec, n, precision=None):
        return cls(OFElement.from_int(spec, n, precision))

    def residue(self):
        return self.value.reduce_mod_pi()

    def is_torsion(self):
        """Root-of-unity test at the value's precision.

        Any root of unity in O_F^x has order t * p^s with t | q-1 and
        phi(p^s) <= e (the ramification needed to contain zeta_{p^s}), so
        it suffices to test g^((q-1) p^smax) = 1 mod pi^N.  Iterating
        further would misclassify every unit: the group mod pi^N is
        finite, so some p-power of anything eventually hits 1.

        True means indistinguishable from a root of unity at precision N;
        a unit that is merely congruent to one mod pi^N needs more digits
        to be certified nontorsion.
        """
        spec = self.spec
        prec = self.value.precision
        ops = spec.raw_ops(prec)
        smax = 0
        while (spec.p - 1) * spec.p ** smax <= spec.e:
            smax += 1
        h = ops.pow_int(ops.from_digits(self.value.digits),
                        (spec.q - 1) * spec.p ** smax)
        return h == ops.one

    def describe(self):
        return {"chi": self.value.to_json()}

    def __repr__(self):
        return f"Gamma(chi={[list(r) for r in self.value.digits]})"


class PerfSeries:
    """Element of the depth-m perfection of k[[Y]]: a truncated series in
    Z with Z^(q^m) = Y, kept at normalized (minimal) depth.

    val_Y is exact rational: val_Z / q^m; the zero series reports the
    sentinel order/q^m.
    """

    __slots__ = ("spec", "depth", "ts")

    def __init__(self, spec, depth, ts, normalize=True):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.spec = spec
        self.depth = depth
        self.ts = ts
        if normalize:
            self._normalize()

    @classmethod
    def from_coeffs(cls, spec, depth, coeffs, order=None):
        return cls(spec, depth, TruncSeries(FqDomain(spec), coeffs, order))

    @classmethod
    def monomial(cls, spec, depth, exponent, order, coeff=1):
        dom = FqDomain(spec)
        return cls(spec, depth, TruncSeries.monomial(dom, coeff, exponent, order))

    def _normalize(self):
        q = self.spec.q
        while self.depth > 0:
            co = self.ts.coeffs
            if any(c and (i % q) for i, c in enumerate(co)):
                break
            # support divisible by q: rewrite in Z^q; q-th roots of the
            # coefficients are the coefficients themselves since k = F_q
            order = -(-self.ts.order // q)
            self.ts = TruncSeries(self.ts.domain, co[::q], order)
            self.depth -= 1

    @property
    def order(self):
        return self.ts.order

    def val_z(self):
        return self.ts.val()

    def val_y(self):
        return Fraction(self.ts.val(), self.spec.q ** self.depth)

    def is_zero(self):
        return self.ts.is_zero()

    def copy_at_depth(self, depth, max_order=None):
        """Re-represent at a deeper level (exponent stride q^(depth - m))."""
        if depth < self.depth:
            raise ValueError("cannot shallow a series below its depth")
        stride = self.spec.q ** (depth - self.depth)
        order = self.ts.order * stride
        if max_order is not None:
            order = min(order, max_order)
        co = [self.ts.domain.zero] * order
        for i, c in enumerate(self.ts.coeffs):
            if i * stride < order:
                co[i * stride] = c
        return PerfSeries(self.spec, depth,
                          TruncSeries(self.ts.domain, co, order), normalize=False)

    def __add__(self, other):
        m = max(self.depth, other.depth)
        a, b = self.copy_at_depth(m), other.copy_at_depth(m)
        return PerfSeries(self.spec, m, a.ts + b.ts)

    def __sub__(self, other):
        m = max(self.depth, other.depth)
        a, b = self.copy_at_depth(m), other.copy_at_depth(m)
        return PerfSeries(self.spec, m, a.ts - b.ts)

    def __mul__(self, other):
        m = max(self.depth, other.depth)
        a, b = self.copy_at_depth(m), other.copy_at_depth(m)
        return PerfSeries(self.spec, m, a.ts.mul_trunc(b.ts, min(a.order, b.order)))

    def eq_mod(self, other, order=None):
        m = max(self.depth, other.depth)
        return self.copy_at_depth(m).ts.eq_mod(other.copy_at_depth(m).ts, order)

    def __repr__(self):
        return f"PerfSeries(depth={self.depth}, val_Y={self.val_y()}, order={self.order})"


# ----------------------------------------------------------------------
# Frobenius


def phi_q(f):
    """Raise to the q-th power: depth decreases, or exponents scale by q
    at depth zero.  Coefficients are fixed since k = F_q."""
    if f.depth > 0:
        return PerfSeries(f.spec, f.depth - 1, f.ts, normalize=False)
    q = f.spec.q
    co = [f.ts.domain.zero] * ((f.ts.order - 1) * q + 1 if f.ts.order else 0)
    for i, c in enumerate(f.ts.coeffs):
        co[i * q] = c
    return PerfSeries(f.spec, 0, TruncSeries(f.ts.domain, co))


def phi_q_inverse(f):
    """Extract the q-th root: depth increases by one, then normalizes."""
    return PerfSeries(f.spec, f.depth + 1, f.ts)


def in_phi_q_image(f):
    """Membership in phi_q(k[[Y]]): after normalization the series must
    live at depth 0 with every exponent divisible by q (k being perfect,
    coefficients impose no condition)."""
    g = PerfSeries(f.spec, f.depth, f.ts)  # normalized copy
    if g.depth > 0:
        return False
    q = g.spec.q
    return all((i % q == 0) or not c for i, c in enumerate(g.ts.coeffs))


# ----------------------------------------------------------------------
# the unit action


def gamma_act(module, gamma, f):
    """gamma(f): substitute the mod-pi reduction of [chi_pi(gamma)] into f,
    at f's depth."""
    module.spec.same_as(gamma.spec)
    w = module.a_reduction(gamma.value, f.ts.order)
    return PerfSeries(f.spec, f.depth, f.ts.compose(w))


# ----------------------------------------------------------------------
# composition predicates


def _as_k_series(f):
    if isinstance(f, PerfSeries):
        if f.depth != 0:
            raise ValueError("operation requires a depth-0 series")
        return f.ts
    return f


def is_separable(f):
    """f' != 0 at truncation (depth 0)."""
    return not _as_k_series(f).derivative().is_zero()


def is_invertible(f):
    """f(0) = 0 and f'(0) in k^x, i.e. invertible under composition."""
    ts = _as_k_series(f)
    if not ts.domain.is_zero(ts.coeff(0)):
        raise NonzeroConstantTerm("series has nonzero constant term")
    return ts.coeff(1) != 0


def is_nontorsion(w, n_max, order=None):
    """No iterate w^(o n), n <= n_max, equals Y at truncation.

    Bounded semi-decision: True certifies nothing beyond n_max; False
    means some iterate is Y at the working order.
    """
    ts = _as_k_series(w)
    if order is not None:
        ts = ts.truncate(order)
    ident = TruncSeries.identity(ts.domain, ts.order)
    cur = ts
    for _ in range(n_max):
        if cur.eq_mod(ident):
            return False
        cur = cur.compose(ts)
    return True


@dataclass
class LubnarchReport:
    weierstrass_degree: int
    invertible: bool
    certificate: dict


def lubnarch_analyze(f, w, m):
    """Weierstrass-degree analysis of a separable f commuting with an
    invertible nontorsion w up to Frobenius twist: twist(w, m) o f = f o w.

    Writes f = f_n Y^n + ..., f' = g_k Y^k + ..., w = Y + w_r Y^r + ...;
    after replacing w by p-fold iterates until r >= k+1, the leading
    terms force (n-1) r = k, which pins n = 1.  Returns the degree and
    the exponent certificate.
    """
    f = _as_k_series(f)
    w = _as_k_series(w)
    dom = f.domain
    if not dom.is_zero(f.coeff(0)):
        raise ValueError("f must have zero constant term")
    df = f.derivative()
    if df.is_zero():
        raise NotSeparable("f' = 0 at truncation")
    if not dom.is_zero(w.coeff(0)) or w.coeff(1) != dom.one:
        raise ValueError("w must be Y + O(Y^2)")

    ident = TruncSeries.identity(dom, w.order)
    if w.eq_mod(ident):
        raise TorsionW("w = Y at truncation")

    lhs = frobenius_twist(w, m).compose(f)
    rhs = f.compose(w)
    if not lhs.eq_mod(rhs):
        raise CommutationFails("twist(w, m) o f != f o w at truncation")

    n = f.val()
    k = df.val()
    ell = 0
    wr = w
    r = (wr - ident).val()
    if k >= 1:
        p = dom.spec.p
        while r < k + 1:
            if ell >= _LUBNARCH_ELL_CAP:
                raise TorsionW(
                    f"could not reach r >= k+1 within p^{_LUBNARCH_ELL_CAP} "
                    "iterates; w behaves like torsion at this truncation")
            nxt = wr
            for _ in range(p - 1):
                nxt = nxt.compose(wr)
            wr = nxt
            ell += 1
            if wr.eq_mod(ident):
                raise TorsionW(f"w^(o p^{ell}) = Y at truncation")
            r = (wr - ident).val()
    cert = {"n": n, "k": k, "r": r, "ell": ell,
            "equation_holds": (n - 1) * r == k}
    return LubnarchReport(weierstrass_degree=n, invertible=(n == 1),
                          certificate=cert)


# ----------------------------------------------------------------------
# derivative and fixed-field witnesses


def ltder_check(module, gamma, K):
    """Is d gamma(Y) / dY the constant residue of chi_pi(gamma) mod Y^(K-1)?

    True for the special-log coordinate whenever F != Q_p (the inverse
    log derivative is 1 mod pi); provably false in general over Q_p,
    where log' mod p picks up the terms Y^(p^t - 1).
    """
    from .lubin_tate import SPECIAL_LOG
    if module.coordinate != SPECIAL_LOG:
        raise WrongCoordinate("derivative check requires the special-log coordinate")
    w = module.a_reduction(gamma.value, K)
    dw = w.derivative()
    gbar = gamma.residue().idx
    want = TruncSeries.constant(w.domain, gbar, dw.order)
    return dw.eq_mod(want)


_KERNEL_WINDOW_CAP = 560


def fixed_field_kernel(module, gamma, K, window=None):
    """Basis of {f in k[Y]/Y^K : gamma(f) = f}, by elimination on the
    matrix of (gamma - 1); expected basis is the constants for
    nontorsion gamma.

    A window of K itself is too small: (gamma - 1) can push corrections
    past Y^K entirely and leave spurious fixed vectors -- every gamma
    fixes Y^32 mod Y^64 on the q = 2 presets, since with
    vD = val(gamma(Y) - gbar Y) the correction of Y^(p^t m') has
    valuation m + p^t (vD - 1), and p-power towers of cancelling
    combinations such as (Y^2 + Y^3)^8 reach vD (deg + p^t).  The
    default window covers the monomial shapes exactly and is doubled,
    up to a cap, if a nonconstant kernel vector still appears; for
    deeply wild gamma (vD ~ q^2 and beyond) the required window grows
    past the cap and the returned basis may retain truncation
    artifacts.  Pass window=K to reproduce the naive artifact.
    """
    if gamma.is_torsion():
        raise TorsionGamma("gamma is a root of unity; its fixed field is larger")
    spec = module.spec
    dom = FqDomain(spec)
    if window is None:
        probe = module.a_reduction(gamma.value, 2 * K)
        gbar = gamma.residue().idx
        vadj = max(2, (probe - TruncSeries.monomial(dom, gbar, 1, 2 * K)).val())
        p = spec.p
        w_need = K + 2
        pt = 1
        while pt < K:
            m_max = ((K - 1) // pt) * pt
            w_need = max(w_need, m_max + pt * (vadj - 1) + 2)
            pt *= p
        out = None
        window = min(w_need, _KERNEL_WINDOW_CAP)
        while True:
            out = fixed_field_kernel(module, gamma, K, window=window)
            if len(out) == 1 or window >= _KERNEL_WINDOW_CAP:
                return out
            window = min(2 * window, _KERNEL_WINDOW_CAP)
    W = max(window, K)
    w = module.a_reduction(gamma.value, W)
    wpow = series_powers(w, K - 1, W)
    # act[m][j] = coefficient of Y^j in (gamma - 1)(Y^m); the kernel
    # condition on f = sum x_m Y^m is sum_m x_m act[m][j] = 0 for each j,
    # i.e. the transposed system.
    act = []
    for mdeg in range(1, K):
        row = list(wpow[mdeg].coeffs) + [0] * (W - wpow[mdeg].order)
        row[mdeg] = spec.ksub(row[mdeg], 1)
        act.append(row[1:])
    nvars = K - 1
    eqs = [[act[mm][jj] for mm in range(nvars)] for jj in range(W - 1)]
    basis = _nullspace(spec, eqs, nvars)
    out = [TruncSeries.constant(dom, 1, K)]
    for vec in basis:
        out.append(TruncSeries(dom, [0] + vec, K))
    return out


def _nullspace(spec, mat, n):
    """Nullspace over k of the matrix given as equation rows of length n."""
    pivots = {}
    rank_rows = []
    for row in mat:
        row = list(row)
        for col, piv_i in sorted(pivots.items()):
            c = row[col]
            if c:
                prow = rank_rows[piv_i]
                for j in range(n):
                    if prow[j]:
                        row[j] = spec.ksub(row[j], spec.kmul(c, prow[j]))
        lead = next((j for j in range(n) if row[j]), None)
        if lead is not None:
            inv = spec.kinv(row[lead])
            pivots[lead] = len(rank_rows)
            rank_rows.append([spec.kmul(inv, c) for c in row])
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for fj in free:
        vec = [0] * n
        vec[fj] = 1
        for col in sorted(pivots, reverse=True):
            prow = rank_rows[pivots[col]]
            s = 0
            for j in range(col + 1, n):
                if prow[j] and vec[j]:
                    s = spec.kadd(s, spec.kmul(prow[j], vec[j]))
            vec[col] = spec.kneg(s)
        basis.append(vec)
    return basis


@dataclass
class NoltraceWitness:
    lhs: PerfSeries
    in_image: bool
    exponents: list


def noltrace_witness(module, gamma, K):
    """Compute (1 - gamma)(Y^(q/p)) and check it lands in phi_q(k[[Y]]).

    Requires q > p (so Y^(q/p) is a proper intermediate power) and
    chi_pi(gamma) = 1 mod pi (so gamma(Y) = Y + f(Y^p) by the constant-
    derivative property)."""
    spec = module.spec
    if spec.q == spec.p:
        raise BaseFieldIsQp("witness needs q > p")
    if gamma.residue().idx != 1:
        raise BadGamma("chi_pi(gamma) must be 1 mod pi")
    q, p = spec.q, spec.p
    e = q // p
    w = module.a_reduction(gamma.value, K)
    gv = w.pow_int(e, K)  # gamma(Y^(q/p)) = [g-bar](Y)^(q/p)
    dom = FqDomain(spec)
    v = TruncSeries.monomial(dom, 1, e, K)
    lhs = v - gv
    perf = PerfSeries(spec, 0, lhs, normalize=False)
    expo = [i for i, c in enumerate(lhs.coeffs) if c]
    return NoltraceWitness(lhs=perf, in_image=in_phi_q_image(perf),
                           exponents=expo)
