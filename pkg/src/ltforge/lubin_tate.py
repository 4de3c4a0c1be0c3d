"""Lubin-Tate formal O_F-modules over a chosen coordinate.

Two coordinates are supported:

  * ``polynomial``: the Frobenius power series is a monic degree-q
    polynomial f with f = pi*T mod deg 2 and f = T^q mod pi (default
    f = T^q + pi*T).  The group law and the endomorphisms [a] are found
    by solving their commutation with f degree by degree; each new
    coefficient appears linearly with pivot pi^m - pi, and the quotient
    is integral by the classical uniqueness argument, which the solver
    asserts.

  * ``special-log``: the coordinate with log(T) = sum_n T^(q^n)/pi^n.
    Here [pi] and the group law are computed through exp/log over the
    floating coefficient field and then demoted to integral series;
    the demotion doubles as a correctness check.

Functional-equation solves run at an internal working precision of
N + log2(K) + pad pi-adic digits.  Each division by (pi^m - pi) costs a
digit, but the loss does not compound linearly: the degree-m equation
reads earlier coefficients c_j through [pi]^j-coefficients whose
valuation grows like (qj - m)/(q - 1), so only the O(log_q m) most
recent shallow coefficients bind.  (Verified against solves at full
N + K headroom in the test suite.)  exp/log run on the floating domain
with a further ceil(K/(q-1)) digits, the worst-case denominator loss.
"""

from __future__ import annotations

import math

from .errors import IntegralityFailure, PrecisionExhausted, WrongCoordinate
from .padic import OFElement
from .series import (BivariateSeries, FDomain, FqDomain, OFDomain, TruncSeries,
                     multiplicative_inverse, of_series_reduce_mod_pi,
                     series_powers)

_SOLVE_PAD = 4
_FLOAT_PAD = 8

POLYNOMIAL = "polynomial"
SPECIAL_LOG = "special-log"


class LTModule:
    """A Lubin-Tate formal O_F-module in a fixed coordinate.

    Construction caches are write-once per (kind, order, precision) key;
    all returned series are immutable, so concurrent use is safe.
    """

    def __init__(self, spec, coordinate=POLYNOMIAL, frobenius_poly=None,
                 precision=None):
        if coordinate not in (POLYNOMIAL, SPECIAL_LOG):
            raise ValueError(f"unknown coordinate {coordinate!r}")
        self.spec = spec
        self.coordinate = coordinate
        self.precision = spec.default_precision if precision is None else precision
        self.kdomain = FqDomain(spec)
        if frobenius_poly is not None and coordinate != POLYNOMIAL:
            raise ValueError("a Frobenius polynomial only makes sense in the "
                             "polynomial coordinate")
        self._frob_poly_input = frobenius_poly
        self._cache = {}

    def __repr__(self):
        return f"LTModule({self.spec!r}, {self.coordinate})"

    # -- internal precisions -------------------------------------------

    def solve_prec(self, K, prec):
        return prec + max(K, 2).bit_length() + _SOLVE_PAD

    def float_prec(self, K, prec):
        q = self.spec.q
        return self.solve_prec(K, prec) + math.ceil(K / (q - 1)) + _FLOAT_PAD

    def _cached(self, key, build):
        val = self._cache.get(key)
        if val is None:
            val = build()
            self._cache.setdefault(key, val)
            val = self._cache[key]
        return val

    def fdomain(self, K, prec=None):
        prec = self.precision if prec is None else prec
        return FDomain(self.spec, self.float_prec(K, prec))

    # -- [pi] ------------------------------------------------------------

    def pi_series(self, K, prec=None):
        """The Frobenius series [pi] mod (pi^prec, T^K)."""
        prec = self.precision if prec is None else prec
        return self._cached(("pi", K, prec),
                            lambda: self._pi_series_w(K, prec).demote(prec))

    def _pi_series_w(self, K, prec):
        """[pi] at full working precision, wrapped with its solve context."""
        return self._cached(("piw", K, prec), lambda: self._build_pi(K, prec))

    def _build_pi(self, K, prec):
        wprec = self.solve_prec(K, prec)
        wdom = OFDomain(self.spec, wprec)
        q = self.spec.q
        if self.coordinate == POLYNOMIAL:
            coeffs = [wdom.zero] * max(K, q + 1)
            if self._frob_poly_input is None:
                coeffs[1] = wdom.ops.pi_shift_up(wdom.one, 1)
                coeffs[q] = wdom.one
            else:
                given = list(self._frob_poly_input)
                if len(given) != q + 1:
                    raise ValueError(f"Frobenius polynomial must have degree q = {q}")
                for i, c in enumerate(given):
                    rows = c if isinstance(c, (list, tuple)) else [[c]]
                    coeffs[i] = wdom.ops.from_digits(
                        rows if isinstance(rows[0], (list, tuple)) else [rows])
            f = TruncSeries(wdom, coeffs, max(K, q + 1))
            self._validate_pi(f, wdom)
            return _Worked(f.truncate(max(K, q + 1)), wdom)
        # special-log: [pi] = exp(pi * log T), demoted to integral coefficients
        fdom = self.fdomain(K, prec)
        logf = self.log_series(K, prec)
        pival = fdom.pi_power(1)
        arg = logf.scalar_mul(pival)
        f = self.exp_series(K, prec).compose(arg)
        fw = _demote_f_series(f, wdom, what="[pi] coefficient")
        self._validate_pi(fw, wdom)
        return _Worked(fw, wdom)

    def _validate_pi(self, f, wdom):
        ops = wdom.ops
        q = self.spec.q
        if not ops.is_zero(f.coeff(0)):
            raise IntegralityFailure("[pi] has nonzero constant term")
        lin = ops.sub(f.coeff(1), ops.pi_shift_up(ops.one, 1))
        if not ops.is_zero(lin):
            raise IntegralityFailure("[pi] is not pi*T mod deg 2")
        for i in range(min(f.order, 2 * q)):
            c = f.coeff(i)
            want_unit = (i == q)
            v = ops.val(c)
            if want_unit:
                if v != 0 or ops.reduce_mod_pi(c) != 1:
                    raise IntegralityFailure("[pi] is not T^q mod pi")
            elif i > 1 and v < 1:
                raise IntegralityFailure("[pi] is not T^q mod pi")

    def pi_reduction(self, K):
        """[pi] mod pi: equals T^q at truncation, precomputed for checks."""
        return of_series_reduce_mod_pi(self.pi_series(K), self.kdomain)

    def _pi_powers(self, K, prec):
        """Powers [pi]^j, j = 0..K-1, at working precision (cached)."""
        def build():
            w = self._pi_series_w(K, prec)
            return series_powers(w.series.truncate(K), K - 1, K)
        return self._cached(("pipow", K, prec), build)

    # -- [a] ---------------------------------------------------------------

    def a_series(self, a, K, prec=None):
        """The endomorphism [a] mod (pi^prec, T^K).

        ``a`` is an int or an OFElement; an OFElement is read through its
        canonical integer representative, so the construction is exact
        for that representative.  Built by solving [a] o [pi] = [pi] o [a]
        degree by degree; a = 0 gives the zero series.
        """
        prec = self.precision if prec is None else prec
        wprec = self.solve_prec(K, prec)
        wdom = OFDomain(self.spec, wprec)
        ops = wdom.ops
        if isinstance(a, OFElement):
            self.spec.same_as(a.spec)
            araw = ops.from_digits(a.digits)
        else:
            araw = ops.from_int(a)
        return self._solve_commutation(araw, K, prec, wdom).demote(prec)

    def _solve_commutation(self, araw, K, prec, wdom):
        ops = wdom.ops
        dz = ops.is_zero
        pipow = self._pi_powers(K, prec)
        fco = self._pi_series_w(K, prec).series.coeffs  # [pi] coefficients
        fdeg = len(fco)
        A = [ops.zero] * K
        if K > 1:
            A[1] = araw
        if K <= 2 or dz(araw):
            return _Worked(TruncSeries(wdom, A, K), wdom)
        # apow[k] = coefficients of (sum A_t T^t)^k, maintained incrementally
        kmax = min(fdeg - 1, K - 1)
        apow = [None, A] + [[ops.zero] * K for _ in range(max(0, kmax - 1))]
        add, mul, sub = ops.add, ops.mul, ops.sub
        pivots = _pivot_cache(ops, K)
        for m in range(2, K):
            for k in range(2, min(kmax, m) + 1):
                prev = apow[k - 1]
                s = ops.zero
                for t in range(1, m - k + 2):
                    at = A[t]
                    if not dz(at):
                        pc = prev[m - t]
                        if not dz(pc):
                            s = add(s, mul(at, pc))
                apow[k][m] = s
            lhs = ops.zero
            for j in range(1, m):
                aj = A[j]
                if not dz(aj):
                    pj = pipow[j].coeff(m)
                    if not dz(pj):
                        lhs = add(lhs, mul(aj, pj))
            rhs = ops.zero
            for k in range(2, min(kmax, m) + 1):
                fk = fco[k]
                if not dz(fk):
                    pk = apow[k][m]
                    if not dz(pk):
                        rhs = add(rhs, mul(fk, pk))
            A[m] = _divide_by_pivot(ops, sub(rhs, lhs), pivots[m],
                                    f"[a] coefficient at degree {m}")
        return _Worked(TruncSeries(wdom, A, K), wdom)

    def a_reduction(self, a, K):
        """[a] mod pi as a series over k."""
        return of_series_reduce_mod_pi(self.a_series(a, K), self.kdomain)

    # -- group law ----------------------------------------------------------

    def group_law(self, K, prec=None):
        """The addition law S(X, Y) mod (pi^prec, total degree K)."""
        prec = self.precision if prec is None else prec
        return self._cached(("S", K, prec), lambda: self._build_S(K, prec))

    def _build_S(self, K, prec):
        if self.coordinate == POLYNOMIAL:
            return self._build_S_polynomial(K, prec)
        return self._build_S_speciallog(K, prec)

    def _build_S_polynomial(self, K, prec):
        wprec = self.solve_prec(K, prec)
        wdom = OFDomain(self.spec, wprec)
        ops = wdom.ops
        dz = ops.is_zero
        add, mul, sub = ops.add, ops.mul, ops.sub
        q = self.spec.q
        pipow = self._pi_powers(K, prec)
        fco = self._pi_series_w(K, prec).series.coeffs
        S = BivariateSeries.zero(wdom, K)
        if K > 1:
            S.rows[1][0] = ops.one
            S.rows[1][1] = ops.one
        # spow[k] = S^k as triangular tables, k = 2..q, filled degree by degree
        spow = {k: [[ops.zero] * (n + 1) for n in range(K)] for k in range(2, q + 1)}
        pivots = _pivot_cache(ops, K)
        for m in range(2, K):
            # extend S^k at total degree m (uses S rows < m only)
            for k in range(2, q + 1):
                prevt = spow[k - 1] if k > 2 else None
                tgt = spow[k][m]
                for n1 in range(1, m):
                    r1 = S.rows[n1]
                    n2 = m - n1
                    r2 = S.rows[n2] if k == 2 else prevt[n2]
                    for j1, c1 in enumerate(r1):
                        if not dz(c1):
                            for j2, c2 in enumerate(r2):
                                if not dz(c2):
                                    j = j1 + j2
                                    tgt[j] = add(tgt[j], mul(c1, c2))
            # solve row m
            row = S.rows[m]
            for j in range(m + 1):
                i = m - j
                rhs = ops.zero  # S([pi]X, [pi]Y) at X^i Y^j, lower-degree cells
                for n in range(1, m):
                    rn = S.rows[n]
                    for jj in range(n + 1):
                        c = rn[jj]
                        if not dz(c):
                            ii = n - jj
                            if ii <= i and jj <= j:
                                px = pipow[ii].coeff(i)
                                if not dz(px):
                                    py = pipow[jj].coeff(j)
                                    if not dz(py):
                                        rhs = add(rhs, mul(c, mul(px, py)))
                lhs = ops.zero  # higher Frobenius terms of [pi](S)
                for k in range(2, q + 1):
                    fk = fco[k]
                    if not dz(fk):
                        c = spow[k][m][j]
                        if not dz(c):
                            lhs = add(lhs, mul(fk, c))
                # pi*s + lhs = s*pi^m + rhs  =>  s = (lhs - rhs)/(pi^m - pi)
                row[j] = _divide_by_pivot(ops, sub(lhs, rhs), pivots[m],
                                          f"group-law cell X^{i}Y^{j}")
        return _demote_bivariate(S, OFDomain(self.spec, prec),
                                 what="group-law coefficient")

    def _build_S_speciallog(self, K, prec):
        fdom = self.fdomain(K, prec)
        logf = self.log_series(K, prec)
        expf = self.exp_series(K, prec)
        lp = series_powers(logf, K - 1, K)
        # S = exp(log X + log Y) expanded binomially:
        #   cell (X^i Y^b) = sum_{j,l} e_{j+l} C(j+l, j) logpow[j]_i logpow[l]_b
        inner = [[fdom.zero] * K for _ in range(K)]
        for j in range(K):
            for b in range(K):
                s = fdom.zero
                for l in range(0, K - j):
                    lc = lp[l].coeff(b) if b < lp[l].order else fdom.zero
                    if lc[1] is not None:
                        ec = expf.coeff(j + l) if j + l >= 1 else fdom.zero
                        if j + l == 0:
                            continue
                        if ec[1] is not None:
                            term = fdom.mul_int(fdom.mul(ec, lc), math.comb(j + l, j))
                            s = fdom.add(s, term)
                inner[j][b] = s
        S = BivariateSeries.zero(fdom, K)
        for n in range(K):
            for b in range(n + 1):
                i = n - b
                s = fdom.zero
                for j in range(0, i + 1):
                    lc = lp[j].coeff(i) if i < lp[j].order else fdom.zero
                    if lc[1] is not None:
                        t = inner[j][b]
                        if t[1] is not None:
                            s = fdom.add(s, fdom.mul(lc, t))
                S.rows[n][b] = s
        return _demote_bivariate_f(S, OFDomain(self.spec, prec),
                                   what="group-law coefficient")

    # -- log / exp ------------------------------------------------------------

    def log_series(self, K, prec=None):
        """log mod T^K over the floating field domain; log = T mod deg 2 and
        the T^n coefficient has valuation >= -floor((n-1)/(q-1))."""
        prec = self.precision if prec is None else prec
        return self._cached(("log", K, prec), lambda: self._build_log(K, prec))

    def _build_log(self, K, prec):
        fdom = self.fdomain(K, prec)
        q = self.spec.q
        if self.coordinate == SPECIAL_LOG:
            coeffs = [fdom.zero] * K
            n, t = 1, 0
            while n < K:
                coeffs[n] = fdom.pi_power(-t)
                n *= q
                t += 1
            return TruncSeries(fdom, coeffs, K)
        # polynomial coordinate: solve log o [pi] = pi * log
        w = self._pi_series_w(K, prec)
        pipow = self._pi_powers(K, prec)
        pipow_f = [TruncSeries(fdom,
                               [fdom.from_of(c, w.domain.ops) for c in s.coeffs],
                               s.order)
                   for s in pipow]
        lam = [fdom.zero] * K
        if K > 1:
            lam[1] = fdom.one
        for m in range(2, K):
            s = fdom.zero
            for j in range(1, m):
                lj = lam[j]
                if lj[1] is not None:
                    pj = pipow_f[j].coeff(m)
                    if pj[1] is not None:
                        s = fdom.add(s, fdom.mul(lj, pj))
            pivot = fdom.sub(fdom.pi_power(m), fdom.pi_power(1))
            lam[m] = fdom.neg(fdom.mul(s, fdom.inv_unit(pivot)))
        out = TruncSeries(fdom, lam, K)
        self._check_log_valuations(out)
        return out

    def _check_log_valuations(self, logf):
        q = self.spec.q
        for n in range(1, logf.order):
            c = logf.coeffs[n]
            if c[1] is not None and c[0] < -((n - 1) // (q - 1)):
                raise PrecisionExhausted(
                    f"log coefficient at T^{n} has valuation {c[0]} below the "
                    f"-(n-1)/(q-1) bound; working precision exhausted")

    def exp_series(self, K, prec=None):
        """exp = the compositional inverse of log, over the floating domain."""
        prec = self.precision if prec is None else prec
        return self._cached(("exp", K, prec),
                            lambda: self.log_series(K, prec).compositional_inverse())

    def exp_power(self, j, K, prec=None):
        """exp^j = sum_n e_{j,n} T^n (cached incrementally over j)."""
        prec = self.precision if prec is None else prec
        if j < 1:
            raise ValueError("exponent must be >= 1")
        key = ("exppow", j, K, prec)
        if key not in self._cache:
            prev = self.exp_series(K, prec) if j == 1 \
                else self.exp_power(j - 1, K, prec).mul_trunc(
                    self.exp_series(K, prec), K)
            self._cache.setdefault(key, prev)
        return self._cache[key]

    # -- identities -------------------------------------------------------

    def locan_identity_check(self, n, c, K, prec=None):
        """Check [1 + p^n c](T) = S(T, exp(p^n c log T)) mod (pi^prec, T^K).

        Returns True/False; raises PrecisionExhausted when the floating
        side cannot decide at the requested precision.
        """
        prec = self.precision if prec is None else prec
        if n < 1:
            raise ValueError("n must be >= 1")
        fdom = self.fdomain(K, prec)
        wdom = OFDomain(self.spec, self.solve_prec(K, prec))
        craw = wdom.ops.from_digits(c.digits) if isinstance(c, OFElement) \
            else wdom.ops.from_int(c)
        pnc = wdom.ops.mul(craw, wdom.ops.from_int(self.spec.p ** n))
        one_plus = wdom.ops.add(wdom.ops.one, pnc)
        lhs = self._solve_commutation(one_plus, K, prec, wdom).demote(prec)
        # rhs: S(T, exp(p^n c log T))
        scal = fdom.from_of(pnc, wdom.ops)
        arg = self.log_series(K, prec).scalar_mul(scal)
        E = self.exp_series(K, prec).compose(arg) if not _f_series_is_zero(arg) \
            else TruncSeries.zero(fdom, K)
        S = self.group_law(K, prec)
        SF = _bivariate_to_f(S, fdom)
        rhs = SF.eval_series(TruncSeries.identity(fdom, K), E)
        return _f_equals_of(rhs, lhs, prec)

    def a_series_via_exp_log(self, a, K, prec=None):
        """[a] computed as exp(a log T); cross-validates the commutation solve."""
        prec = self.precision if prec is None else prec
        fdom = self.fdomain(K, prec)
        wdom = OFDomain(self.spec, self.solve_prec(K, prec))
        araw = wdom.ops.from_digits(a.digits) if isinstance(a, OFElement) \
            else wdom.ops.from_int(a)
        arg = self.log_series(K, prec).scalar_mul(fdom.from_of(araw, wdom.ops))
        if _f_series_is_zero(arg):
            return TruncSeries.zero(OFDomain(self.spec, prec), K)
        E = self.exp_series(K, prec).compose(arg)
        return _demote_f_series(E, OFDomain(self.spec, prec),
                                what="[a] coefficient")

    # -- invariant derivative ------------------------------------------------

    def inv_log_derivative(self, K, prec=None):
        """1/log'(T) as an integral series (special-log coordinate only)."""
        if self.coordinate != SPECIAL_LOG:
            raise WrongCoordinate("invariant derivative needs the special-log "
                                  "coordinate")
        prec = self.precision if prec is None else prec

        def build():
            dom = OFDomain(self.spec, prec)
            ops = dom.ops
            q = self.spec.q
            co = [dom.zero] * K
            n, t = 1, 0
            while n <= K:
                # q^t / pi^t is integral of valuation t(de - 1)
                val_q = ops.from_int(q ** t)
                co[n - 1] = ops.pi_shift_down(val_q, t)
                n *= q
                t += 1
            logp = TruncSeries(dom, co, K)
            return multiplicative_inverse(logp, K), logp
        return self._cached(("invlogp", K, prec), build)

    def invariant_derivative(self, f, prec=None):
        """(1/log') d/dT applied to a series over O_F; integral output."""
        inv_lp, _ = self.inv_log_derivative(f.order, prec or f.domain.prec)
        df = f.derivative()
        return df.mul_trunc(inv_lp.truncate(df.order), df.order)


class _Worked:
    """A series together with the working-precision domain it was built in."""

    __slots__ = ("series", "domain")

    def __init__(self, series, domain):
        self.series = series
        self.domain = domain

    def demote(self, prec):
        tgt = OFDomain(self.domain.spec, prec)
        conv = tgt.ops.convert
        src = self.domain.ops
        return TruncSeries(tgt, [conv(src, c) for c in self.series.coeffs],
                           self.series.order)


def _pivot_cache(ops, K):
    """(pi^m - pi)/pi as units u_m, m = 2..K-1: inverse pivots for the solves.

    Returns a list where entry m is (inverse of u_m); dividing by the
    pivot is pi_shift_down once then multiplying by that inverse.
    """
    piv = [None, None]
    pw = ops.one
    for m in range(2, K):
        pw = ops.pi_shift_up(pw, 1)  # pi^{m-1}
        piv.append(ops.inv(ops.sub(pw, ops.one)))
    return piv


def _divide_by_pivot(ops, num, inv_unit, what):
    if ops.val(num) < 1:
        raise IntegralityFailure(
            f"{what}: numerator not divisible by pi; the functional-equation "
            "solve is inconsistent")
    return ops.mul(ops.pi_shift_down(num, 1), inv_unit)


def _demote_bivariate(S, target_dom, what):
    conv = target_dom.ops.convert
    src = S.domain.ops
    out = BivariateSeries.zero(target_dom, S.order)
    for n, row in enumerate(S.rows):
        out.rows[n] = [conv(src, c) for c in row]
    return out


def _demote_bivariate_f(S, target_dom, what):
    fdom = S.domain
    out = BivariateSeries.zero(target_dom, S.order)
    for n, row in enumerate(S.rows):
        out.rows[n] = [fdom.to_of(c, target_dom, what=what) for c in row]
    return out


def _demote_f_series(f, target_dom, what):
    fdom = f.domain
    try:
        co = [fdom.to_of(c, target_dom, what=what) for c in f.coeffs]
    except PrecisionExhausted as exc:
        if "negative valuation" in str(exc):
            raise IntegralityFailure(str(exc)) from exc
        raise
    return TruncSeries(target_dom, co, f.order)


def _bivariate_to_f(S, fdom):
    src = S.domain.ops
    out = BivariateSeries.zero(fdom, S.order)
    for n, row in enumerate(S.rows):
        out.rows[n] = [fdom.from_of(c, src) for c in row]
    return out


def _f_series_is_zero(f):
    return all(c[1] is None for c in f.coeffs)


def _f_equals_of(f_ser, of_ser, prec):
    """Does the floating series equal the integral one mod (pi^prec, T^K)?"""
    fdom = f_ser.domain
    src = of_ser.domain.ops
    n = min(f_ser.order, of_ser.order)
    for i in range(n):
        d = fdom.sub(f_ser.coeffs[i], fdom.from_of(of_ser.coeffs[i], src))
        v, u, r = d
        if u is None:
            if v < prec:
                raise PrecisionExhausted(
                    f"comparison at T^{i} only resolved mod pi^{v} < pi^{prec}")
            continue
        if v < prec:
            return False
    return True
