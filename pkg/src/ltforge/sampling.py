"""Seeded sampling helpers.

All randomness in the test suites and the CLI flows through explicit
random.Random instances created from a single seed, so identical seeds
give identical runs byte for byte.
"""

from __future__ import annotations

from .padic import OFElement, uniformizer


def sample_element(spec, rng, precision=None):
    precision = spec.default_precision if precision is None else precision
    ops = spec.raw_ops(precision)
    return OFElement.from_raw(spec, ops.sample(rng), precision)


def sample_unit(spec, rng, precision=None):
    precision = spec.default_precision if precision is None else precision
    ops = spec.raw_ops(precision)
    return OFElement.from_raw(spec, ops.sample_unit(rng), precision)


def principal_unit(spec, level=1, precision=None):
    """1 + pi^level as an OFElement."""
    precision = spec.default_precision if precision is None else precision
    ops = spec.raw_ops(precision)
    return OFElement.from_raw(
        spec, ops.add(ops.one, ops.pi_shift_up(ops.one, level)), precision)


def sample_principal_unit(spec, rng, level=1, precision=None):
    """1 + pi^level * (random integral element)."""
    precision = spec.default_precision if precision is None else precision
    ops = spec.raw_ops(precision)
    x = ops.pi_shift_up(ops.sample(rng), level)
    return OFElement.from_raw(spec, ops.add(ops.one, x), precision)


def sample_nontorsion_unit(spec, rng, precision=None, max_tries=200):
    """A unit certified nontorsion at the given precision."""
    from .charp import GammaElement
    for _ in range(max_tries):
        u = sample_unit(spec, rng, precision)
        g = GammaElement(u)
        if not g.is_torsion():
            return u
    raise RuntimeError("could not sample a nontorsion unit; precision too low?")


def sample_shallow_unit(spec, rng, precision=None, max_tries=200):
    """A nontorsion unit of shape teich(c) * (1 + pi * unit).

    Its action on k[[Y]] moves Y already at degree q, which keeps
    window-based kernel computations affordable; a fully random unit can
    sit arbitrarily close to a root of unity and act arbitrarily deep.
    """
    from .charp import GammaElement
    from .padic import FqElement, teichmuller
    precision = spec.default_precision if precision is None else precision
    ops = spec.raw_ops(precision)
    for _ in range(max_tries):
        c = rng.randrange(1, spec.q)
        t = teichmuller(FqElement(spec, c), precision)
        u = ops.add(ops.one, ops.pi_shift_up(ops.sample_unit(rng), 1))
        g = OFElement.from_raw(spec, ops.mul(ops.from_digits(t.digits), u),
                               precision)
        if not GammaElement(g).is_torsion():
            return g
    raise RuntimeError("could not sample a shallow nontorsion unit")


def sample_k_series(spec, rng, order, val_one=True):
    """Random series over k, by default with valuation exactly one."""
    from .series import FqDomain, TruncSeries
    q = spec.q
    co = [rng.randrange(q) for _ in range(order)]
    co[0] = 0
    if val_one:
        co[1] = rng.randrange(1, q)
    return TruncSeries(FqDomain(spec), co, order)
