"""Characteristic-zero lifts of perfectoid series and unit recovery.

The depth-m polynomial model consists of series over O_F/pi^N in a
variable Z that reduces to Y^(1/q^m); Frobenius acts totally on this
model by substituting [pi] for Z, and re-representing a depth-m series
one level deeper amounts to the same substitution.

colmez_lift computes the unique Frobenius-compatible lift of a
perfectoid series by a Hensel walk: the defect of a naive lift vanishes
mod pi, and since [pi]' = 0 mod pi the correction at pi-digit j+1 is
read off from a q-th root of the reduced defect, which may deepen the
model by one level per digit.  recover_a runs the full pipeline: check
commutation with a finite set of topological generators of O_F^x, lift,
certify invertibility through the Weierstrass-degree analysis, then read
the acting unit off the lift's linear coefficient and verify the
claimed identity coefficient by coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .charp import (GammaElement, PerfSeries, lubnarch_analyze, phi_q_inverse)
from .errors import (BudgetExceeded, NoSeparablePower, NotEquivariant,
                     ValuationZero, VerificationFailed, WrongValuation)
from .padic import FqElement, OFElement, teichmuller
from .sampling import principal_unit
from .series import (FqDomain, OFDomain, TruncSeries, k_series_lift,
                     of_series_reduce_mod_pi)


class LiftSeries:
    """A series over O_F/pi^prec in the depth-m coordinate Z."""

    __slots__ = ("module", "depth", "ts")

    def __init__(self, module, depth, ts):
        self.module = module
        self.depth = depth
        self.ts = ts

    @property
    def order(self):
        return self.ts.order

    @property
    def precision(self):
        return self.ts.domain.prec

    def reduction(self):
        """The PerfSeries obtained by reducing coefficients mod pi."""
        return PerfSeries(self.module.spec, self.depth,
                          of_series_reduce_mod_pi(self.ts))

    def frobenius(self):
        """phi_q: substitute [pi] for the deep coordinate; O_F-linear."""
        piS = self.module.pi_series(self.ts.order, self.precision)
        return LiftSeries(self.module, self.depth, self.ts.compose(piS))

    def at_depth(self, depth):
        """Re-represent at a deeper level via Z_m = [pi](Z_{m+1})."""
        if depth < self.depth:
            raise ValueError("cannot shallow a lift below its depth")
        ts = self.ts
        piS = self.module.pi_series(ts.order, self.precision)
        for _ in range(depth - self.depth):
            ts = ts.compose(piS)
        return LiftSeries(self.module, depth, ts)

    def eq_mod(self, other, order=None):
        if self.depth != other.depth:
            m = max(self.depth, other.depth)
            return self.at_depth(m).eq_mod(other.at_depth(m), order)
        return self.ts.eq_mod(other.ts, order)

    def __repr__(self):
        return (f"LiftSeries(depth={self.depth}, order={self.order}, "
                f"precision={self.precision})")


def lift_phi_q(x):
    return x.frobenius()


def colmez_lift(module, u, precision=None, order=None, max_depth=None,
                initial=None):
    """The unique lift x of u with phi_q(x) = [pi](x) mod (pi^N, Z^K').

    Hensel walk on pi-digits: each correction solves the linearized
    equation through an exact q-th root of the reduced defect, deepening
    the model by at most one level per digit; the depth budget
    (input depth + N by default) is reserved up front.  The result does
    not depend on the initial naive lift; pass one to see that.
    """
    spec = module.spec
    N = module.precision if precision is None else precision
    u = PerfSeries(spec, u.depth, u.ts)  # normalized copy
    if u.is_zero() or u.val_z() < 1:
        raise ValuationZero("lift input must have positive valuation")
    K = u.order if order is None else min(order, u.order)
    # each of the N-1 pi-digit corrections can deepen the model by one
    # level; reserve the whole budget up front so failure is predictable
    budget = (u.depth + N) if max_depth is None else max_depth
    if budget < u.depth + N - 1:
        raise BudgetExceeded(
            f"depth budget {budget} cannot reserve input depth {u.depth} "
            f"plus {N - 1} correction levels")

    wdom = OFDomain(spec, N + 1)
    piS = module.pi_series(K, N + 1)
    if initial is None:
        x = k_series_lift(u.ts.truncate(K), wdom, mode="teich")
    else:
        x = TruncSeries(wdom, [wdom.ops.from_digits(c.digits)
                               if isinstance(c, OFElement) else c
                               for c in initial.coeffs], K)
        if not of_series_reduce_mod_pi(x).eq_mod(u.ts, K):
            raise ValueError("initial lift does not reduce to the input")
    depth = u.depth

    for j in range(N - 1):
        defect = x.compose(piS) - piS.compose(x)
        if defect.is_zero():
            break
        vmin = min(wdom.ops.val(c) for c in defect.coeffs)
        if vmin < j + 1:
            raise AssertionError(
                f"Hensel defect has valuation {vmin} < {j + 1}; lift broken")
        scaled = TruncSeries(
            wdom, [wdom.ops.pi_shift_down(c, j + 1) for c in defect.coeffs],
            defect.order)
        eps = PerfSeries(spec, depth, of_series_reduce_mod_pi(scaled))
        if eps.is_zero():
            continue
        # solve phi_q(eta) = -eps for the digit correction
        eta = phi_q_inverse(PerfSeries(spec, depth, -eps.ts))
        assert eta.depth <= budget, "reserved depth budget violated"
        if eta.depth > depth:
            x = _embed_ts(x, piS, eta.depth - depth)
            depth = eta.depth
        eta_deep = eta.copy_at_depth(depth, max_order=x.order)
        corr = k_series_lift(eta_deep.ts, wdom, mode="digits")
        corr = TruncSeries(
            wdom, [wdom.ops.pi_shift_up(c, j + 1) for c in corr.coeffs],
            corr.order)
        x = x + corr.truncate(x.order)

    lift = LiftSeries(module, depth, _clamp_prec(x, N))
    _verify_frobenius(module, lift, N)
    return lift


def _embed_ts(ts, piS, levels):
    for _ in range(levels):
        ts = ts.compose(piS)
    return ts


def _clamp_prec(ts, prec):
    tgt = OFDomain(ts.domain.spec, prec)
    conv = tgt.ops.convert
    return TruncSeries(tgt, [conv(ts.domain.ops, c) for c in ts.coeffs],
                       ts.order)


def _verify_frobenius(module, lift, N):
    piS = module.pi_series(lift.order, N)
    d = lift.ts.compose(piS) - piS.compose(lift.ts)
    if not d.is_zero():
        raise AssertionError("lift does not satisfy the Frobenius equation")


# ----------------------------------------------------------------------
# equivariance


@dataclass
class EquivarianceReport:
    ok: bool
    generators: list
    failures: list = field(default_factory=list)


def default_generators(spec, precision=None):
    """Topological generators of O_F^x used for sampled equivariance:
    the Teichmuller lift of a generator of k^x, 1 + pi, and 1 + pi^2."""
    precision = spec.default_precision if precision is None else precision
    gens = []
    gen = spec.k_multiplicative_generator()
    if gen != 1:
        gens.append(GammaElement(teichmuller(FqElement(spec, gen), precision)))
    gens.append(GammaElement(principal_unit(spec, 1, precision)))
    gens.append(GammaElement(principal_unit(spec, 2, precision)))
    return gens


def check_equivariance(module, u, gens=None):
    """Does u commute with [g] for every sampled generator g?

    Compares u o [g] and [g] o u in the depth-m variable out to u's
    order; reports every failing generator with the first mismatch.
    """
    spec = module.spec
    gens = default_generators(spec, module.precision) if gens is None else gens
    K = u.ts.order
    failures = []
    for g in gens:
        w = module.a_reduction(g.value, K)
        lhs = u.ts.compose(w)
        rhs = w.compose(u.ts)
        if not lhs.eq_mod(rhs):
            diff = lhs - rhs
            failures.append({"generator": g.describe(),
                             "first_mismatch_exponent": diff.val()})
    return EquivarianceReport(ok=not failures,
                              generators=[g.describe() for g in gens],
                              failures=failures)


# ----------------------------------------------------------------------
# p-power normalization


def pm_normalize(u):
    """The p-power twist f = u^(p^m) landing in Y k[[Y]] separable, with
    m minimal in absolute value; returns (f, m).

    At depth n with exponent support S, m = n*d - min_{i in S} v_p(i):
    the twist scales exponents by p^m/q^n and applies the p^m-power
    Frobenius to coefficients (negative m extracts p-th roots; k is
    perfect, so this is exact).
    """
    spec = u.spec
    if u.is_zero():
        raise NoSeparablePower("zero series has no separable twist")
    support = [i for i, c in enumerate(u.ts.coeffs) if c]
    if support and support[0] == 0:
        raise ValuationZero("input must have positive valuation")
    t = min(_vp(i, spec.p) for i in support)
    m = u.depth * spec.d - t
    pt = spec.p ** t
    order = -(-u.ts.order // pt)
    dom = FqDomain(spec)
    co = [0] * order
    for i in support:
        co[i // pt] = spec.kfrob(u.ts.coeffs[i], m)
    f = TruncSeries(dom, co, order)
    if f.derivative().is_zero():
        raise NoSeparablePower("twist is inseparable; input support broken")
    return f, m


def _vp(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ----------------------------------------------------------------------
# recovery


@dataclass
class RecoveryResult:
    a: OFElement
    depth: int
    precision: int
    generators_checked: list
    verified_order: int

    def to_json(self):
        return {"a": self.a.to_json(), "depth": self.depth,
                "precision": self.precision,
                "generators_checked": self.generators_checked,
                "verified_order": self.verified_order}


def recover_a(module, u, precision=None, order=None, gens=None):
    """Recover the unit a with u = reduction of [a] at u's depth.

    Pipeline: normalize the input and require it to be a uniformizer in
    its own variable (val_Z = 1, so val_Y = q^-depth); check commutation
    with the sampled generators; compute the Frobenius-compatible lift
    and require it to stay at the input's depth; certify invertibility
    of the depth-zero twist through the Weierstrass-degree analysis;
    read a off the lift's linear coefficient and verify both the
    characteristic-p identity u = [a-bar](Z) and the characteristic-zero
    identity lift = [a](Z) at the reported order.
    """
    spec = module.spec
    N = module.precision if precision is None else precision
    u = PerfSeries(spec, u.depth, u.ts)
    n = u.depth
    if u.val_z() != 1:
        raise WrongValuation(
            f"val_Z(u) = {u.val_z()} at depth {n}; recovery needs a "
            "uniformizer-like input with val_Z = 1")
    report = check_equivariance(module, u, gens=gens)
    if not report.ok:
        first = report.failures[0]
        raise NotEquivariant(
            "input does not commute with the sampled unit actions "
            f"(first failure: generator {first['generator']}, exponent "
            f"{first['first_mismatch_exponent']})",
            generator=first["generator"])

    lift = colmez_lift(module, u, precision=N, order=order)
    if lift.depth != n:
        raise VerificationFailed(
            f"lift escaped to depth {lift.depth} != input depth {n}; "
            "input is not of the expected form at this precision")

    # invertibility certificate on the depth-zero twist
    f, mexp = pm_normalize(u)
    w = of_series_reduce_mod_pi(
        module.a_series(principal_unit(spec, 1, N), f.order))
    cert = lubnarch_analyze(f, w, mexp)
    if cert.weierstrass_degree != 1:
        raise VerificationFailed(
            f"Weierstrass degree {cert.weierstrass_degree} != 1")

    a_raw = lift.ts.coeff(1)
    a = OFElement.from_raw(spec, a_raw, lift.precision)
    if a.val_pi() != 0:
        raise VerificationFailed("linear coefficient of the lift is not a unit")
    aS = module.a_series(a, lift.order, lift.precision)
    if not of_series_reduce_mod_pi(aS).eq_mod(u.ts, lift.order):
        raise VerificationFailed(
            "reduction of [a] does not reproduce the input")
    if not aS.eq_mod(lift.ts, lift.order):
        raise VerificationFailed(
            "lift does not agree with [a] at the reported order")
    return RecoveryResult(a=a, depth=n, precision=N,
                          generators_checked=report.generators,
                          verified_order=lift.order)
