"""Truncated power-series algebra over the coefficient rings of padic.

Three coefficient domains are supported:

  * ``OF``  -- O_F/pi^N           (raw digit values of padic.raw_ops)
  * ``Fq``  -- the residue field  (ints in [0, q))
  * ``F``   -- pi-adically floating field values with tracked valuations,
               stored as (valuation, unit, relative_precision) triples;
               valuations may be negative.

A TruncSeries of order K knows its coefficients 0..K-1; higher
coefficients are semantically unknown, not zero.  Order propagation:

  * f + g                order min(Kf, Kg)
  * f * g                order min(Kf + val_T(g), Kg + val_T(f)), capped
                         at Kf + Kg
  * f o g  (val g >= 1)  order min(Kg, val_T(g) * Kf)

Outputs never claim a higher order than these rules justify.
"""

from __future__ import annotations

from .errors import (MixedRing, NonzeroConstantTerm, NotInvertible,
                     PrecisionExhausted)

_INF = 10 ** 9


# ----------------------------------------------------------------------
# coefficient domains


class FqDomain:
    """Residue-field coefficients; values are ints in [0, q)."""

    tag = "Fq"

    def __init__(self, spec):
        self.spec = spec
        self.zero = 0
        self.one = 1

    def key(self):
        return ("Fq", self.spec)

    def from_int(self, n):
        return n % self.spec.p

    def add(self, a, b):
        return self.spec.kadd(a, b)

    def sub(self, a, b):
        return self.spec.ksub(a, b)

    def neg(self, a):
        return self.spec.kneg(a)

    def mul(self, a, b):
        return self.spec.kmul(a, b)

    def mul_int(self, a, n):
        return self.mul(a, self.from_int(n))

    def inv_unit(self, a):
        if a == 0:
            raise NotInvertible("zero is not invertible in k")
        return self.spec.kinv(a)

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a != 0

    def convolve(self, xs, ys, nout):
        spec = self.spec
        tab = spec._ktables()
        out = [0] * nout
        if tab["small"]:
            mtab, atab = tab["mul"], tab["add"]
            for i, x in enumerate(xs):
                if x and i < nout:
                    mrow = mtab[x]
                    stop = min(len(ys), nout - i)
                    for j in range(stop):
                        y = ys[j]
                        if y:
                            k = i + j
                            out[k] = atab[out[k]][mrow[y]]
        else:
            for i, x in enumerate(xs):
                if x and i < nout:
                    stop = min(len(ys), nout - i)
                    for j in range(stop):
                        y = ys[j]
                        if y:
                            k = i + j
                            out[k] = spec.kadd(out[k], spec.kmul(x, y))
        return out


class OFDomain:
    """O_F/pi^prec coefficients; values are raw digit encodings."""

    tag = "OF"

    def __init__(self, spec, prec):
        self.spec = spec
        self.prec = prec
        self.ops = spec.raw_ops(prec)
        self.zero = self.ops.zero
        self.one = self.ops.one
        kind = type(self.ops).__name__
        if kind == "_OpsScalar":
            self.convolve = self._convolve_scalar
        elif kind == "_OpsUnramQuad":
            self.convolve = self._convolve_unram_quad
        elif kind == "_OpsRamQuad":
            self.convolve = self._convolve_ram_quad
        else:
            self.convolve = self._convolve_generic

    def key(self):
        return ("OF", self.spec, self.prec)

    def from_int(self, n):
        return self.ops.from_int(n)

    def add(self, a, b):
        return self.ops.add(a, b)

    def sub(self, a, b):
        return self.ops.sub(a, b)

    def neg(self, a):
        return self.ops.neg(a)

    def mul(self, a, b):
        return self.ops.mul(a, b)

    def mul_int(self, a, n):
        return self.ops.mul(a, self.ops.from_int(n))

    def inv_unit(self, a):
        return self.ops.inv(a)

    def is_zero(self, a):
        return self.ops.is_zero(a)

    def is_unit(self, a):
        return self.ops.val(a) == 0

    def at_precision(self, prec):
        return OFDomain(self.spec, prec)

    def _convolve_scalar(self, xs, ys, nout):
        pN = self.ops.pN
        out = [0] * nout
        for i, x in enumerate(xs):
            if x and i < nout:
                stop = min(len(ys), nout - i)
                for j in range(stop):
                    y = ys[j]
                    if y:
                        out[i + j] += x * y
        return [c % pN for c in out]

    def _convolve_unram_quad(self, xs, ys, nout):
        pN = self.ops.pN
        u0, u1 = self.ops.u0, self.ops.u1
        o0 = [0] * nout
        o1 = [0] * nout
        for i, x in enumerate(xs):
            if i >= nout:
                break
            x0, x1 = x
            if x0 or x1:
                stop = min(len(ys), nout - i)
                for j in range(stop):
                    y0, y1 = ys[j]
                    if y0 or y1:
                        k = i + j
                        t2 = x1 * y1
                        o0[k] += x0 * y0 - u0 * t2
                        o1[k] += x0 * y1 + x1 * y0 - u1 * t2
        return [(a % pN, b % pN) for a, b in zip(o0, o1)]

    def _convolve_ram_quad(self, xs, ys, nout):
        m0, m1 = self.ops.m0, self.ops.m1
        E0, E1 = self.ops.E0, self.ops.E1
        o0 = [0] * nout
        o1 = [0] * nout
        for i, x in enumerate(xs):
            if i >= nout:
                break
            x0, x1 = x
            if x0 or x1:
                stop = min(len(ys), nout - i)
                for j in range(stop):
                    y0, y1 = ys[j]
                    if y0 or y1:
                        k = i + j
                        t2 = x1 * y1
                        o0[k] += x0 * y0 - E0 * t2
                        o1[k] += x0 * y1 + x1 * y0 - E1 * t2
        return [(a % m0, b % m1) for a, b in zip(o0, o1)]

    def _convolve_generic(self, xs, ys, nout):
        ops = self.ops
        out = [ops.zero] * nout
        for i, x in enumerate(xs):
            if i >= nout:
                break
            if not ops.is_zero(x):
                stop = min(len(ys), nout - i)
                for j in range(stop):
                    y = ys[j]
                    if not ops.is_zero(y):
                        out[i + j] = ops.add(out[i + j], ops.mul(x, y))
        return out


class FDomain:
    """Floating pi-adic field values (valuation, unit, relative precision).

    A value (v, u, r) stands for pi^v * u known mod pi^(v+r); u is a unit
    of O_F stored at the working relative precision R.  (v, None, 0)
    stands for an element only known to be O(pi^v); exact zero has
    v = _INF.  Relative precision is preserved by multiplication and
    division and only degrades on cancellative addition, which is why the
    exp/log machinery runs on this domain instead of fixed-point O_F.
    """

    tag = "F"

    def __init__(self, spec, rel_prec):
        self.spec = spec
        self.R = rel_prec
        self.ops = spec.raw_ops(rel_prec)
        self.zero = (_INF, None, 0)
        self.one = (0, self.ops.one, rel_prec)

    def key(self):
        return ("F", self.spec, self.R)

    def from_int(self, n):
        if n == 0:
            return self.zero
        raw = self.ops.from_int(n)
        v = self.ops.val(raw)
        if v >= self.R:
            return (self.R, None, 0)
        return (v, self.ops.pi_shift_down(raw, v), self.R - v)

    def from_of(self, raw, of_ops):
        """Lift a raw O_F value known mod pi^of_ops.prec."""
        mine = self.ops.convert(of_ops, raw) if of_ops is not self.ops else raw
        prec = min(of_ops.prec, self.R)
        v = self.ops.val(mine)
        if v >= prec:
            return (prec, None, 0)
        return (v, self.ops.pi_shift_down(mine, v), prec - v)

    def pi_power(self, v):
        return (v, self.ops.one, self.R)

    def is_zero(self, a):
        return a[1] is None

    def is_unit(self, a):
        return a[1] is not None and a[0] == 0

    def val_floor(self, a):
        """Lower bound for val_pi; exact when the value is not a fuzzy zero."""
        return a[0]

    def neg(self, a):
        v, u, r = a
        return a if u is None else (v, self.ops.neg(u), r)

    def mul(self, a, b):
        va, ua, ra = a
        vb, ub, rb = b
        if ua is None or ub is None:
            return (min(va + vb, _INF), None, 0)
        return (va + vb, self.ops.mul(ua, ub), min(ra, rb))

    def mul_int(self, a, n):
        return self.mul(a, self.from_int(n))

    def inv_unit(self, a):
        v, u, r = a
        if u is None:
            raise NotInvertible("cannot invert a (fuzzy) zero")
        return (-v, self.ops.inv(u), r)

    def add(self, a, b):
        va, ua, ra = a
        vb, ub, rb = b
        if ua is None and ub is None:
            return (min(va, vb), None, 0)
        if ua is None:
            if va >= vb + rb:
                return b
            if va <= vb:
                return (va, None, 0)
            return (vb, ub, va - vb)
        if ub is None:
            return self.add(b, a)
        w = min(va, vb)
        known = min(va + ra, vb + rb) - w
        known = min(known, self.R)
        if known <= 0:
            return (w, None, 0)
        if va - w >= known:
            return (vb, ub, known)
        if vb - w >= known:
            return (va, ua, known)
        sa = self.ops.pi_shift_up(ua, va - w) if va > w else ua
        sb = self.ops.pi_shift_up(ub, vb - w) if vb > w else ub
        s = self.ops.add(sa, sb)
        t = self.ops.val(s)
        if t >= known:
            return (w + known, None, 0)
        return (w + t, self.ops.pi_shift_down(s, t), known - t)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def to_of(self, a, of_domain, what="coefficient"):
        """Demote an integral value to O_F/pi^prec; raises if the value is
        not known to enough digits."""
        v, u, r = a
        target = of_domain.prec
        if u is None:
            if v < target:
                raise PrecisionExhausted(
                    f"{what} only known to be O(pi^{v}) < pi^{target}")
            return of_domain.zero
        if v < 0:
            raise PrecisionExhausted(f"{what} has negative valuation {v}")
        if v + r < target:
            raise PrecisionExhausted(
                f"{what} known mod pi^{v + r}, need pi^{target}")
        raw = self.ops.pi_shift_up(u, v) if v else u
        return of_domain.ops.convert(self.ops, raw)

    def convolve(self, xs, ys, nout):
        out = [self.zero] * nout
        add, mul = self.add, self.mul
        for i, x in enumerate(xs):
            if i >= nout:
                break
            if x[1] is not None:
                stop = min(len(ys), nout - i)
                for j in range(stop):
                    y = ys[j]
                    if y[1] is not None:
                        out[i + j] = add(out[i + j], mul(x, y))
        return out


# ----------------------------------------------------------------------
# univariate series


class TruncSeries:
    """Truncated power series: coefficients 0..order-1 over a domain."""

    __slots__ = ("domain", "coeffs", "order")

    def __init__(self, domain, coeffs, order=None):
        if order is None:
            order = len(coeffs)
        coeffs = list(coeffs[:order])
        if len(coeffs) < order:
            coeffs.extend([domain.zero] * (order - len(coeffs)))
        self.domain = domain
        self.coeffs = coeffs
        self.order = order

    # -- constructors --

    @classmethod
    def zero(cls, domain, order):
        return cls(domain, [], order)

    @classmethod
    def identity(cls, domain, order):
        c = [domain.zero] * order
        if order > 1:
            c[1] = domain.one
        return cls(domain, c, order)

    @classmethod
    def constant(cls, domain, value, order):
        c = [domain.zero] * order
        c[0] = value
        return cls(domain, c, order)

    @classmethod
    def monomial(cls, domain, value, degree, order):
        c = [domain.zero] * order
        if degree < order:
            c[degree] = value
        return cls(domain, c, order)

    # -- helpers --

    def _match(self, other):
        if self.domain.key() != other.domain.key():
            raise MixedRing(
                f"series rings differ: {self.domain.key()} vs {other.domain.key()}")

    def coeff(self, i):
        return self.coeffs[i] if i < self.order else self.domain.zero

    def val(self):
        """T-adic order of vanishing; order K means zero at truncation."""
        dz = self.domain.is_zero
        for i, c in enumerate(self.coeffs):
            if not dz(c):
                return i
        return self.order

    def is_zero(self):
        return self.val() == self.order

    def truncate(self, order):
        if order >= self.order:
            return self
        return TruncSeries(self.domain, self.coeffs[:order], order)

    # -- ring operations --

    def __add__(self, other):
        self._match(other)
        n = min(self.order, other.order)
        add = self.domain.add
        return TruncSeries(self.domain,
                           [add(a, b) for a, b in
                            zip(self.coeffs[:n], other.coeffs[:n])], n)

    def __sub__(self, other):
        self._match(other)
        n = min(self.order, other.order)
        sub = self.domain.sub
        return TruncSeries(self.domain,
                           [sub(a, b) for a, b in
                            zip(self.coeffs[:n], other.coeffs[:n])], n)

    def __neg__(self):
        neg = self.domain.neg
        return TruncSeries(self.domain, [neg(c) for c in self.coeffs], self.order)

    def scalar_mul(self, c):
        mul = self.domain.mul
        return TruncSeries(self.domain, [mul(c, x) for x in self.coeffs], self.order)

    def __mul__(self, other):
        self._match(other)
        n = min(self.order + other.val(), other.order + self.val(),
                self.order + other.order)
        out = self.domain.convolve(self.coeffs, other.coeffs, n)
        return TruncSeries(self.domain, out, n)

    def mul_trunc(self, other, order):
        """Product truncated to the given order (never above the sound one)."""
        self._match(other)
        n = min(order,
                self.order + other.val(), other.order + self.val())
        out = self.domain.convolve(self.coeffs, other.coeffs, n)
        return TruncSeries(self.domain, out, n)

    def pow_int(self, n, order=None):
        order = self.order if order is None else order
        acc = TruncSeries.constant(self.domain, self.domain.one, order)
        base = self.truncate(order)
        while n:
            if n & 1:
                acc = acc.mul_trunc(base, order)
            base = base.mul_trunc(base, order)
            n >>= 1
        return acc

    # -- composition algebra --

    def compose(self, inner):
        """self o inner; inner must have vanishing constant term."""
        self._match(inner)
        if not self.domain.is_zero(inner.coeff(0)):
            raise NonzeroConstantTerm("inner series has nonzero constant term")
        v = inner.val()
        if v == 0:
            v = 1  # only possible for order-0 inner
        n = min(inner.order, v * self.order)
        dom = self.domain
        res = TruncSeries.zero(dom, n)
        # Horner from the top coefficient
        for i in range(self.order - 1, -1, -1):
            res = res.mul_trunc(inner, n)
            c = self.coeffs[i]
            if not dom.is_zero(c):
                cs = list(res.coeffs)
                cs[0] = dom.add(cs[0], c)
                res = TruncSeries(dom, cs, n)
        return res

    def compositional_inverse(self):
        """Series g with self o g = g o self = T at truncation.

        Degree-by-degree solve off incrementally maintained powers of g;
        requires vanishing constant term and unit linear coefficient.
        """
        dom = self.domain
        if not dom.is_zero(self.coeff(0)):
            raise NonzeroConstantTerm("cannot invert: nonzero constant term")
        K = self.order
        if K < 2:
            return TruncSeries.zero(dom, K)
        f1 = self.coeff(1)
        if not dom.is_unit(f1):
            raise NotInvertible("linear coefficient is not a unit")
        f1inv = dom.inv_unit(f1)
        add, mul, dz = dom.add, dom.mul, dom.is_zero
        g = [dom.zero] * K
        g[1] = f1inv
        # gpow[j][m] = coefficient of T^m in g^j, filled degree by degree
        gpow = [None, g] + [[dom.zero] * K for _ in range(K - 2)]
        for m in range(2, K):
            # extend powers at degree m using only g_1..g_{m-1}
            for j in range(2, m + 1):
                prev = gpow[j - 1]
                s = dom.zero
                for t in range(1, m - j + 2):
                    gt = g[t]
                    if not dz(gt):
                        pc = prev[m - t]
                        if not dz(pc):
                            s = add(s, mul(gt, pc))
                gpow[j][m] = s
            acc = dom.zero
            for j in range(2, m + 1):
                fj = self.coeff(j)
                if not dz(fj):
                    pj = gpow[j][m]
                    if not dz(pj):
                        acc = add(acc, mul(fj, pj))
            g[m] = mul(dom.neg(acc), f1inv)
            # (g^1)_m is just g_m; powers j >= 2 at degree m do not involve it
        return TruncSeries(dom, g, K)

    def derivative(self):
        dom = self.domain
        out = [dom.mul_int(self.coeffs[i], i) for i in range(1, self.order)]
        return TruncSeries(dom, out, self.order - 1)

    # -- comparisons --

    def eq_mod(self, other, order=None):
        self._match(other)
        n = min(self.order, other.order)
        if order is not None:
            n = min(n, order)
        sub, dz = self.domain.sub, self.domain.is_zero
        return all(dz(sub(a, b)) for a, b in
                   zip(self.coeffs[:n], other.coeffs[:n]))

    def __repr__(self):
        return (f"TruncSeries<{self.domain.tag}>"
                f"(order={self.order}, val={self.val()})")


def frobenius_twist(w, m):
    """Coefficient-wise p^m-power of a series over k; m may be negative."""
    if w.domain.tag != "Fq":
        raise MixedRing("frobenius twist applies to series over k")
    spec = w.domain.spec
    return TruncSeries(w.domain, [spec.kfrob(c, m) for c in w.coeffs], w.order)


def series_powers(f, jmax, order=None):
    """[f^0, f^1, ..., f^jmax] at the given truncation order."""
    order = f.order if order is None else order
    out = [TruncSeries.constant(f.domain, f.domain.one, order), f.truncate(order)]
    for _ in range(2, jmax + 1):
        out.append(out[-1].mul_trunc(f, order))
    return out


def multiplicative_inverse(f, order=None):
    """1/f by Newton doubling; the constant term must be a unit."""
    order = f.order if order is None else order
    dom = f.domain
    c0 = f.coeff(0)
    if not dom.is_unit(c0):
        raise NotInvertible("constant term is not a unit")
    two = TruncSeries.constant(dom, dom.from_int(2), order)
    g = TruncSeries.constant(dom, dom.inv_unit(c0), order)
    n = 1
    while n < order:
        n = min(2 * n, order)
        g = g.mul_trunc(two - f.truncate(n).mul_trunc(g, n), n)
        g = TruncSeries(dom, g.coeffs, n)
    return TruncSeries(dom, g.coeffs, order)


def of_series_reduce_mod_pi(f, kdomain=None):
    """Reduce a series over O_F/pi^N to a series over k."""
    dom = f.domain
    kdom = kdomain or FqDomain(dom.spec)
    red = dom.ops.reduce_mod_pi
    return TruncSeries(kdom, [red(c) for c in f.coeffs], f.order)


def k_series_lift(f, of_domain, mode="teich"):
    """Lift a series over k to O_F/pi^prec coefficient-wise.

    mode "teich" uses Teichmuller lifts, mode "digits" the naive
    digit-for-digit lift; any mode gives a valid lift mod pi.
    """
    ops = of_domain.ops
    lift = ops.teich if mode == "teich" else ops.teich_seed
    return TruncSeries(of_domain, [lift(c) for c in f.coeffs], f.order)


# ----------------------------------------------------------------------
# bivariate series (total-degree truncation)


class BivariateSeries:
    """sum s_{i,j} X^i Y^j truncated by total degree: i + j < order.

    rows[n][j] is the coefficient of X^(n-j) Y^j.
    """

    __slots__ = ("domain", "rows", "order")

    def __init__(self, domain, rows, order=None):
        if order is None:
            order = len(rows)
        rows = [list(r) + [domain.zero] * (n + 1 - len(r))
                for n, r in enumerate(rows[:order])]
        while len(rows) < order:
            rows.append([domain.zero] * (len(rows) + 1))
        self.domain = domain
        self.rows = rows
        self.order = order

    @classmethod
    def zero(cls, domain, order):
        return cls(domain, [], order)

    def coeff(self, i, j):
        n = i + j
        return self.rows[n][j] if n < self.order else self.domain.zero

    def __add__(self, other):
        n = min(self.order, other.order)
        add = self.domain.add
        rows = [[add(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows[:n], other.rows[:n])]
        return BivariateSeries(self.domain, rows, n)

    def __sub__(self, other):
        n = min(self.order, other.order)
        sub = self.domain.sub
        rows = [[sub(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows[:n], other.rows[:n])]
        return BivariateSeries(self.domain, rows, n)

    def mul_trunc(self, other, order=None):
        order = min(self.order, other.order) if order is None else order
        dom = self.domain
        add, mul, dz = dom.add, dom.mul, dom.is_zero
        rows = [[dom.zero] * (n + 1) for n in range(order)]
        for n1, r1 in enumerate(self.rows):
            if n1 >= order:
                break
            for j1, c1 in enumerate(r1):
                if dz(c1):
                    continue
                for n2, r2 in enumerate(other.rows):
                    n = n1 + n2
                    if n >= order:
                        break
                    row = rows[n]
                    for j2, c2 in enumerate(r2):
                        if not dz(c2):
                            j = j1 + j2
                            row[j] = add(row[j], mul(c1, c2))
        return BivariateSeries(dom, rows, order)

    def is_symmetric(self):
        dz, sub = self.domain.is_zero, self.domain.sub
        for n, row in enumerate(self.rows):
            for j in range(n + 1):
                if not dz(sub(row[j], row[n - j])):
                    return False
        return True

    def eval_edge_x(self):
        """S(X, 0) as a univariate series in X."""
        return TruncSeries(self.domain, [row[0] for row in self.rows], self.order)

    def eval_edge_y(self):
        """S(0, Y) as a univariate series in Y."""
        return TruncSeries(self.domain, [row[-1] for row in self.rows], self.order)

    def partial_x_at_zero(self):
        """(dS/dX)(0, T): the series sum_j s_{1,j} T^j."""
        dom = self.domain
        out = [dom.zero] * (self.order - 1)
        for j in range(self.order - 1):
            out[j] = self.rows[j + 1][j]
        return TruncSeries(dom, out, self.order - 1)

    def eval_series(self, fx, fy):
        """Substitute univariate series (with positive T-order) for X and Y."""
        if not self.domain.is_zero(fx.coeff(0)) or \
           not self.domain.is_zero(fy.coeff(0)):
            raise NonzeroConstantTerm("substituted series must vanish at 0")
        vx = max(fx.val(), 1)
        vy = max(fy.val(), 1)
        n = min(fx.order, fy.order, self.order * min(vx, vy))
        dom = self.domain
        dz = dom.is_zero
        xpow = series_powers(fx, max(0, self.order - 1), n)
        ypow = series_powers(fy, max(0, self.order - 1), n)
        acc = TruncSeries.zero(dom, n)
        # sum_i X^i * (sum_j s_{i,j} Y^j)
        for i in range(self.order):
            inner = None
            for j in range(self.order - i):
                c = self.coeff(i, j)
                if not dz(c):
                    term = ypow[j].scalar_mul(c).truncate(n)
                    inner = term if inner is None else inner + term
            if inner is not None:
                acc = acc + inner.mul_trunc(xpow[i], n)
        return acc

    def __repr__(self):
        return f"BivariateSeries<{self.domain.tag}>(order={self.order})"
