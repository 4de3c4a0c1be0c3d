"""Exact arithmetic in O_F/pi^N and the residue field k, for F/Q_p finite.

A field F is described by Eisenstein data over an unramified subfield:
a prime p, the residue degree d, the ramification index e, a degree-d
polynomial over Z_p that is irreducible mod p (defining the unramified
part F_0 = Q_p(w)), and a monic degree-e Eisenstein polynomial over
O_{F_0} (defining the uniformizer pi).  q = p^d.

Elements of O_F/pi^N are written

    x = sum_{i<e} c_i pi^i,   c_i in O_{F_0} = Z_p[w]/(unram_poly),

and stored pi-digit major as e rows of d integers.  Digit i is reduced
mod p^ceil((N-i)/e); since the pi-valuations of the summands c_i pi^i
are distinct mod e, this representation is unique per residue class,
and val_pi / reduction mod pi are O(1) reads.

Precision is a property of values: binary operations truncate to the
minimum precision of their operands.  All values are immutable.
"""

from __future__ import annotations

import json
from functools import lru_cache

from .errors import MixedSpec, NotAUnit

_K_TABLE_CAP = 256  # build full residue-field op tables up to this q


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _poly_mulmod_p(a, b, mod_poly, p):
    """Product of coefficient lists a, b modulo (mod_poly, p); mod_poly monic."""
    d = len(mod_poly) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    for s in range(len(out) - 1, d - 1, -1):
        c = out[s]
        if c:
            out[s] = 0
            for t in range(d):
                out[s - d + t] = (out[s - d + t] - c * mod_poly[t]) % p
    return [c % p for c in out[:d]] + [0] * max(0, d - len(out))


def _poly_gcd_mod_p(a, b, p):
    a = [c % p for c in a]
    b = [c % p for c in b]
    while any(b):
        while b and b[-1] % p == 0:
            b.pop()
        if not b:
            break
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b) and any(a):
            while a and a[-1] % p == 0:
                a.pop()
            if len(a) < len(b):
                break
            shift = len(a) - len(b)
            c = (a[-1] * inv) % p
            for i, bi in enumerate(b):
                a[i + shift] = (a[i + shift] - c * bi) % p
        a, b = b, a
    while a and a[-1] % p == 0:
        a.pop()
    return a


def _irreducible_mod_p(poly, p):
    """Degree-d poly is irreducible mod p iff it shares no factor of degree <= d/2
    with any X^(p^i) - X; those gcds detect factors of degree dividing i."""
    d = len(poly) - 1
    if d == 1:
        return True
    if poly[-1] % p != 1 % p:
        return False
    # x^(p^i) mod poly by repeated p-th powering
    xp = [0, 1]
    for i in range(1, d // 2 + 1):
        cur = [c for c in xp]
        acc = [1]
        e = p
        base = cur
        while e:
            if e & 1:
                acc = _poly_mulmod_p(acc, base, poly, p)
            base = _poly_mulmod_p(base, base, poly, p)
            e >>= 1
        xp = acc
        probe = list(xp)
        while len(probe) < 2:
            probe.append(0)
        probe[1] = (probe[1] - 1) % p
        g = _poly_gcd_mod_p(probe, poly, p)
        if len(g) > 1:
            return False
    return True


def _vec_val_p(coords, p, cap):
    v = cap
    for c in coords:
        if c:
            w = 0
            while c % p == 0 and w < cap:
                c //= p
                w += 1
            if w < v:
                v = w
            if v == 0:
                return 0
    return v


class LocalFieldSpec:
    """Immutable description of F/Q_p: prime, residue degree, ramification,
    Eisenstein polynomial for pi and defining polynomial for the
    unramified part.  Validation is fatal: downstream arithmetic silently
    breaks on bad data, so bad specs never construct."""

    __slots__ = ("p", "d", "e", "q", "unram_poly", "eisenstein",
                 "default_precision", "name", "_ktab", "_ops_cache")

    def __init__(self, p, d, e, eisenstein, unram_poly=None,
                 default_precision=8, name=None):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if d < 1 or e < 1:
            raise ValueError("residue degree and ramification index must be >= 1")
        if default_precision < 1:
            raise ValueError("default_precision must be >= 1")
        self.p = p
        self.d = d
        self.e = e
        self.q = p ** d
        self.name = name
        self.default_precision = default_precision

        if unram_poly is None:
            if d != 1:
                raise ValueError("unram_poly is required when d > 1")
            unram_poly = (0, 1)
        unram_poly = tuple(int(c) for c in unram_poly)
        if len(unram_poly) != d + 1:
            raise ValueError(f"unram_poly must have degree d = {d}")
        if unram_poly[-1] % p != 1 % p:
            raise ValueError("unram_poly must be monic mod p")
        if not _irreducible_mod_p(list(unram_poly), p):
            raise ValueError("unram_poly is reducible mod p")
        self.unram_poly = unram_poly

        eis = []
        for c in eisenstein:
            if isinstance(c, (list, tuple)):
                row = tuple(int(x) for x in c)
                if len(row) > d:
                    raise ValueError("eisenstein coefficient exceeds unramified degree")
                row = row + (0,) * (d - len(row))
            else:
                row = (int(c),) + (0,) * (d - 1)
            eis.append(row)
        if len(eis) != e + 1:
            raise ValueError(f"eisenstein must have degree e = {e}")
        if eis[-1] != (1,) + (0,) * (d - 1):
            raise ValueError("eisenstein polynomial must be monic")
        # Eisenstein criterion: middle coefficients divisible by p, constant
        # term of p-valuation exactly one.
        for row in eis[:-1]:
            if _vec_val_p(row, p, 2) < 1:
                raise ValueError("eisenstein coefficient not divisible by p")
        if _vec_val_p(eis[0], p, 2) != 1:
            raise ValueError("eisenstein constant term must have p-valuation exactly 1")
        self.eisenstein = tuple(eis)

        self._ktab = None
        self._ops_cache = {}

    # --- identity ----------------------------------------------------

    def _key(self):
        return (self.p, self.d, self.e, self.eisenstein, self.unram_poly)

    def __eq__(self, other):
        return isinstance(other, LocalFieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        tag = self.name or f"p{self.p}d{self.d}e{self.e}"
        return f"LocalFieldSpec({tag}, q={self.q})"

    def same_as(self, other):
        if self != other:
            raise MixedSpec(f"mixed field specs: {self!r} vs {other!r}")

    # --- residue field k = F_q ----------------------------------------
    #
    # Residue-field values are plain ints in [0, q): the index
    # sum_j c_j p^j of the coefficient vector in the power basis of w.

    def _ktables(self):
        tab = self._ktab
        if tab is None:
            tab = self._build_ktables()
            self._ktab = tab
        return tab

    def _build_ktables(self):
        p, d, q = self.p, self.d, self.q
        mod = [c % p for c in self.unram_poly]
        if q > _K_TABLE_CAP:
            return {"small": False}
        vecs = []
        for idx in range(q):
            v, n = [], idx
            for _ in range(d):
                v.append(n % p)
                n //= p
            vecs.append(v)

        def enc(v):
            n = 0
            for c in reversed(v):
                n = n * p + (c % p)
            return n

        add = [[enc([(a + b) % p for a, b in zip(vecs[i], vecs[j])])
                for j in range(q)] for i in range(q)]
        mul = [[enc(_poly_mulmod_p(vecs[i], vecs[j], mod, p)) for j in range(q)]
               for i in range(q)]
        neg = [enc([(-a) % p for a in vecs[i]]) for i in range(q)]
        inv = [0] * q
        for i in range(1, q):
            for j in range(1, q):
                if mul[i][j] == 1:
                    inv[i] = j
                    break
        frob = [0] * q
        for i in range(q):
            acc, base, n = 1, i, p
            while n:
                if n & 1:
                    acc = mul[acc][base]
                base = mul[base][base]
                n >>= 1
            frob[i] = acc
        return {"small": True, "add": add, "mul": mul, "neg": neg,
                "inv": inv, "frob": frob, "vecs": [tuple(v) for v in vecs]}

    def k_decode(self, idx):
        """Index -> coefficient tuple in the power basis of w."""
        tab = self._ktables()
        if tab["small"]:
            return tab["vecs"][idx]
        v, n = [], idx
        for _ in range(self.d):
            v.append(n % self.p)
            n //= self.p
        return tuple(v)

    def k_encode(self, coeffs):
        n = 0
        for c in reversed(list(coeffs)):
            n = n * self.p + (c % self.p)
        return n

    def kadd(self, i, j):
        tab = self._ktables()
        if tab["small"]:
            return tab["add"][i][j]
        return self.k_encode([a + b for a, b in
                              zip(self.k_decode(i), self.k_decode(j))])

    def kneg(self, i):
        tab = self._ktables()
        if tab["small"]:
            return tab["neg"][i]
        return self.k_encode([-a for a in self.k_decode(i)])

    def ksub(self, i, j):
        return self.kadd(i, self.kneg(j))

    def kmul(self, i, j):
        tab = self._ktables()
        if tab["small"]:
            return tab["mul"][i][j]
        mod = [c % self.p for c in self.unram_poly]
        return self.k_encode(_poly_mulmod_p(list(self.k_decode(i)),
                                            list(self.k_decode(j)), mod, self.p))

    def kinv(self, i):
        if i == 0:
            raise ZeroDivisionError("inverse of 0 in the residue field")
        tab = self._ktables()
        if tab["small"]:
            return tab["inv"][i]
        return self.kpow(i, self.q - 2)

    def kpow(self, i, n):
        if n < 0:
            i, n = self.kinv(i), -n
        acc, base = 1, i
        while n:
            if n & 1:
                acc = self.kmul(acc, base)
            base = self.kmul(base, base)
            n >>= 1
        return acc

    def kfrob(self, i, m=1):
        """p^m-power map on k; m may be negative since k is perfect."""
        m %= self.d
        tab = self._ktables()
        for _ in range(m):
            if tab["small"]:
                i = tab["frob"][i]
            else:
                i = self.kpow(i, self.p)
        return i

    def k_multiplicative_generator(self):
        q = self.q
        if q == 2:
            return 1
        for g in range(2, q):
            x, order = g, 1
            while x != 1:
                x = self.kmul(x, g)
                order += 1
            if order == q - 1:
                return g
        raise AssertionError("no generator found; residue field tables broken")

    # --- raw integer-limb arithmetic ----------------------------------

    def raw_ops(self, prec):
        """Arithmetic context for O_F/pi^prec on raw digit values."""
        ops = self._ops_cache.get(prec)
        if ops is None:
            if self.e == 1 and self.d == 1:
                ops = _OpsScalar(self, prec)
            elif self.e == 1 and self.d == 2:
                ops = _OpsUnramQuad(self, prec)
            elif self.e == 2 and self.d == 1:
                ops = _OpsRamQuad(self, prec)
            else:
                ops = _OpsGeneric(self, prec)
            self._ops_cache[prec] = ops
        return ops


class _OpsBase:
    """Shared scaffolding for raw O_F/pi^prec arithmetic.

    Values are canonical digit encodings whose concrete shape depends on
    the subclass (a bare int when e*d == 1, otherwise a flat tuple of
    e*d ints, pi-digit major).  Subclasses provide mul/add/... tuned for
    their field shape.
    """

    def __init__(self, spec, prec):
        if prec < 1:
            raise ValueError("precision must be >= 1")
        self.spec = spec
        self.prec = prec
        p, e = spec.p, spec.e
        self.p = p
        self.e = e
        self.d = spec.d
        self.q = spec.q
        # digit i of x (coefficient of pi^i) is canonically reduced mod
        # p^ceil((prec-i)/e)
        self.digit_exp = [max(0, -(-(prec - i) // e)) for i in range(e)]
        self.digit_mod = [p ** m for m in self.digit_exp]

    # -- conversions ----------------------------------------------------

    def from_digits(self, rows):
        flat = []
        for i in range(self.e):
            row = rows[i] if i < len(rows) else ()
            for j in range(self.d):
                c = int(row[j]) if j < len(row) else 0
                flat.append(c % self.digit_mod[i])
        return self.pack(flat)

    def to_digits(self, v):
        flat = self.unpack(v)
        return tuple(tuple(flat[i * self.d: (i + 1) * self.d])
                     for i in range(self.e))

    def from_int(self, n):
        rows = [[0] * self.d for _ in range(self.e)]
        rows[0][0] = int(n)
        return self.from_digits(rows)

    def convert(self, other_ops, v):
        """Reinterpret a value from another precision context (truncating)."""
        return self.from_digits(other_ops.to_digits(v))

    # -- generic helpers built on subclass primitives --------------------

    def pow_int(self, v, n):
        if n < 0:
            v, n = self.inv(v), -n
        acc, base = self.one, v
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            n >>= 1
        return acc

    def inv(self, v):
        """Newton inversion; requires val_pi(v) = 0."""
        r = self.reduce_mod_pi(v)
        if r == 0:
            raise NotAUnit("cannot invert: element has positive valuation")
        y = self.teich_seed(self.spec.kinv(r))
        two = self.from_int(2)
        steps = max(1, (self.prec - 1).bit_length() + 1)
        for _ in range(steps):
            y = self.mul(y, self.sub(two, self.mul(v, y)))
        return y

    def teich_seed(self, kidx):
        """Any lift of a residue-field element (digit-for-digit)."""
        rows = [list(self.spec.k_decode(kidx))] + \
               [[0] * self.d for _ in range(self.e - 1)]
        return self.from_digits(rows)

    def teich(self, kidx):
        """Teichmuller lift: the unique lift fixed by x -> x^q."""
        x = self.teich_seed(kidx)
        for _ in range(self.prec + 1):
            nx = self.pow_int(x, self.q)
            if nx == x:
                break
            x = nx
        return x

    def pi_shift_down(self, v, t=1):
        """Exact division by pi^t; requires val_pi(v) >= t."""
        for _ in range(t):
            v = self._shift_down_1(v)
        return v

    def pi_shift_up(self, v, t=1):
        for _ in range(t):
            v = self._shift_up_1(v)
        return v

    def sample(self, rng):
        flat = [rng.randrange(self.digit_mod[i])
                for i in range(self.e) for _ in range(self.d)]
        return self.pack(flat)

    def sample_unit(self, rng):
        while True:
            v = self.sample(rng)
            if self.val(v) == 0:
                return v


class _OpsScalar(_OpsBase):
    """e = d = 1: values are plain ints mod p^prec."""

    def __init__(self, spec, prec):
        super().__init__(spec, prec)
        self.pN = self.digit_mod[0]
        self.zero = 0
        self.one = 1 % self.pN
        # pi = -E0 with val_p(E0) = 1; p/pi = -(E0/p)^{-1} mod p^prec
        e0 = spec.eisenstein[0][0]
        self.pi_val = (-e0) % self.pN
        u = (-e0) // self.p  # pi = p*u with u a unit
        self.p_over_pi = pow(u % self.pN, -1, self.pN) if self.pN > 1 else 0

    def pack(self, flat):
        return flat[0] % self.pN

    def unpack(self, v):
        return [v]

    def add(self, a, b):
        return (a + b) % self.pN

    def sub(self, a, b):
        return (a - b) % self.pN

    def neg(self, a):
        return (-a) % self.pN

    def mul(self, a, b):
        return (a * b) % self.pN

    def is_zero(self, a):
        return a == 0

    def val(self, a):
        if a == 0:
            return self.prec
        p, v = self.p, 0
        while a % p == 0:
            a //= p
            v += 1
        return v

    def reduce_mod_pi(self, v):
        return v % self.p

    def _shift_down_1(self, v):
        return ((v // self.p) * self.p_over_pi) % self.pN

    def _shift_up_1(self, v):
        return (v * self.pi_val) % self.pN


class _OpsUnramQuad(_OpsBase):
    """e = 1, d = 2: values (a0, a1) with w^2 = -u1*w - u0."""

    def __init__(self, spec, prec):
        super().__init__(spec, prec)
        self.pN = self.digit_mod[0]
        self.u0 = spec.unram_poly[0]
        self.u1 = spec.unram_poly[1]
        self.zero = (0, 0)
        self.one = (1 % self.pN, 0)
        e0 = spec.eisenstein[0]  # pi = -(e00 + e01*w), p-valuation exactly 1
        u = (-e0[0] // self.p, -e0[1] // self.p)
        self.pi_vec = ((-e0[0]) % self.pN, (-e0[1]) % self.pN)
        self.p_over_pi = self.inv_raw(u)

    def pack(self, flat):
        return (flat[0] % self.pN, flat[1] % self.pN)

    def unpack(self, v):
        return [v[0], v[1]]

    def add(self, a, b):
        return ((a[0] + b[0]) % self.pN, (a[1] + b[1]) % self.pN)

    def sub(self, a, b):
        return ((a[0] - b[0]) % self.pN, (a[1] - b[1]) % self.pN)

    def neg(self, a):
        return ((-a[0]) % self.pN, (-a[1]) % self.pN)

    def mul(self, a, b):
        a0, a1 = a
        b0, b1 = b
        t2 = a1 * b1
        return ((a0 * b0 - self.u0 * t2) % self.pN,
                (a0 * b1 + a1 * b0 - self.u1 * t2) % self.pN)

    def is_zero(self, a):
        return a[0] == 0 and a[1] == 0

    def val(self, a):
        return _vec_val_p(a, self.p, self.prec)

    def reduce_mod_pi(self, v):
        return self.spec.k_encode((v[0], v[1]))

    def inv_raw(self, u):
        return self.inv(self.pack([u[0], u[1]]))

    def _shift_down_1(self, v):
        t = (v[0] // self.p, v[1] // self.p)
        return self.mul(t, self.p_over_pi)

    def _shift_up_1(self, v):
        return self.mul(v, self.pi_vec)


class _OpsRamQuad(_OpsBase):
    """e = 2, d = 1: values (c0, c1) = c0 + c1*pi with pi^2 = -E1*pi - E0."""

    def __init__(self, spec, prec):
        super().__init__(spec, prec)
        self.m0, self.m1 = self.digit_mod
        self.E0 = spec.eisenstein[0][0]
        self.E1 = spec.eisenstein[1][0]
        self.zero = (0, 0)
        self.one = (1 % self.m0, 0)
        # mu = pi^2/p = -(E0/p + (E1/p) pi) is a unit; p/pi = pi * mu^{-1}
        mu = ((-self.E0 // self.p) % self.m0, (-self.E1 // self.p) % self.m1)
        self.p_over_pi = self.mul((0, 1 % self.m1), self._inv_unit(mu))

    def pack(self, flat):
        return (flat[0] % self.m0, flat[1] % self.m1)

    def unpack(self, v):
        return [v[0], v[1]]

    def add(self, a, b):
        return ((a[0] + b[0]) % self.m0, (a[1] + b[1]) % self.m1)

    def sub(self, a, b):
        return ((a[0] - b[0]) % self.m0, (a[1] - b[1]) % self.m1)

    def neg(self, a):
        return ((-a[0]) % self.m0, (-a[1]) % self.m1)

    def mul(self, a, b):
        a0, a1 = a
        b0, b1 = b
        t2 = a1 * b1  # pi^2 = -E0 - E1*pi
        return ((a0 * b0 - self.E0 * t2) % self.m0,
                (a0 * b1 + a1 * b0 - self.E1 * t2) % self.m1)

    def is_zero(self, a):
        return a[0] == 0 and a[1] == 0

    def val(self, a):
        v = self.prec
        if a[0]:
            v = min(v, 2 * _vec_val_p((a[0],), self.p, self.prec))
        if a[1]:
            v = min(v, 2 * _vec_val_p((a[1],), self.p, self.prec) + 1)
        return min(v, self.prec)

    def reduce_mod_pi(self, v):
        return v[0] % self.p

    def _inv_unit(self, u):
        y = (pow(u[0] % self.p, -1, self.p), 0)
        two = (2 % self.m0, 0)
        for _ in range(max(1, (self.prec - 1).bit_length() + 2)):
            y = self.mul(y, self.sub(two, self.mul(u, y)))
        return y

    def _shift_down_1(self, v):
        # x = c0 + c1*pi with p | c0:  x/pi = c1 + (c0/p)*(p/pi)
        t = self.mul(self.pack([v[0] // self.p, 0]), self.p_over_pi)
        return ((v[1] + t[0]) % self.m0, t[1] % self.m1)

    def _shift_up_1(self, v):
        # x*pi = c0*pi + c1*pi^2 = -E0*c1 + (c0 - E1*c1)*pi
        return ((-self.E0 * v[1]) % self.m0, (v[0] - self.E1 * v[1]) % self.m1)


class _OpsGeneric(_OpsBase):
    """Arbitrary (e, d): flat tuples of e*d ints, two-stage reduction.

    Slower than the shape-specialized contexts; used for user-supplied
    fields outside the preset shapes.
    """

    def __init__(self, spec, prec):
        super().__init__(spec, prec)
        p, d, e = self.p, self.d, self.e
        self.n = e * d
        self.zero = (0,) * self.n
        one = [0] * self.n
        one[0] = 1 % self.digit_mod[0]
        self.one = tuple(one)
        # exact integer data for reductions
        self.umod = list(spec.unram_poly)
        self.eis = [list(row) for row in spec.eisenstein[:-1]]
        mu_rows = [[(-c) // p for c in row] for row in self.eis]  # pi^e/p digits
        mu = self.from_digits(mu_rows)
        pi = [0] * self.n
        if e > 1:
            pi[d] = 1
            pi_vec = self.pack(pi)
        else:
            pi_vec = self.from_digits([[(-c) for c in self.eis[0]]])
        self.pi_vec = pi_vec
        mu_inv = self.inv(mu) if self.val(mu) == 0 else None
        if mu_inv is None:
            raise AssertionError("Eisenstein data does not give a unit pi^e/p")
        self.p_over_pi = self.mul(self.pow_int(pi_vec, e - 1), mu_inv) \
            if e > 1 else mu_inv

    def pack(self, flat):
        d = self.d
        return tuple(flat[i * d + j] % self.digit_mod[i]
                     for i in range(self.e) for j in range(d))

    def unpack(self, v):
        return list(v)

    def add(self, a, b):
        return self.pack([x + y for x, y in zip(a, b)])

    def sub(self, a, b):
        return self.pack([x - y for x, y in zip(a, b)])

    def neg(self, a):
        return self.pack([-x for x in a])

    def _wfold(self, row):
        d = self.d
        for s in range(len(row) - 1, d - 1, -1):
            c = row[s]
            if c:
                row[s] = 0
                for t in range(d):
                    row[s - d + t] -= c * self.umod[t]
        return row

    def mul(self, a, b):
        d, e = self.d, self.e
        # stage 1: product as a polynomial in pi with O_{F_0} coefficients
        rows = [[0] * (2 * d - 1) for _ in range(2 * e - 1)]
        for i1 in range(e):
            o1 = i1 * d
            for i2 in range(e):
                o2 = i2 * d
                row = rows[i1 + i2]
                for j1 in range(d):
                    c = a[o1 + j1]
                    if c:
                        for j2 in range(d):
                            row[j1 + j2] += c * b[o2 + j2]
        # stage 2: fold pi-degrees >= e via pi^e = -sum E_j pi^j, reducing
        # the w-degree of each source row first so E_j products stay in range
        for s in range(2 * e - 2, e - 1, -1):
            src = self._wfold(rows[s])
            if any(src[:d]):
                for j in range(e):
                    ej = self.eis[j]
                    dst = rows[s - e + j]
                    for j1 in range(d):
                        c = src[j1]
                        if c:
                            for j2 in range(d):
                                dst[j1 + j2] -= c * ej[j2]
        flat = []
        for i in range(self.e):
            flat.extend(self._wfold(rows[i])[:d])
        return self.pack(flat)

    def is_zero(self, a):
        return all(c == 0 for c in a)

    def val(self, a):
        d, e, best = self.d, self.e, self.prec
        for i in range(e):
            coords = a[i * d:(i + 1) * d]
            if any(coords):
                v = e * _vec_val_p(coords, self.p, self.prec) + i
                if v < best:
                    best = v
        return min(best, self.prec)

    def reduce_mod_pi(self, v):
        return self.spec.k_encode(tuple(c % self.p for c in v[:self.d]))

    def _shift_down_1(self, v):
        d = self.d
        head = self.pack(list(v[d:]) + [0] * d)
        c0 = self.pack([c // self.p for c in v[:d]] + [0] * (self.n - d))
        return self.add(head, self.mul(c0, self.p_over_pi))

    def _shift_up_1(self, v):
        return self.mul(v, self.pi_vec)


# --- public wrappers ----------------------------------------------------

class FqElement:
    """Element of the residue field k = F_q in canonical reduced form."""

    __slots__ = ("spec", "idx")

    def __init__(self, spec, coeffs):
        self.spec = spec
        if isinstance(coeffs, int):
            if not 0 <= coeffs < spec.q:
                coeffs = spec.k_encode([coeffs % spec.p])
            self.idx = coeffs
        else:
            self.idx = spec.k_encode(coeffs)

    @property
    def coeffs(self):
        return self.spec.k_decode(self.idx)

    def __add__(self, other):
        self.spec.same_as(other.spec)
        return FqElement(self.spec, self.spec.kadd(self.idx, other.idx))

    def __sub__(self, other):
        self.spec.same_as(other.spec)
        return FqElement(self.spec, self.spec.ksub(self.idx, other.idx))

    def __neg__(self):
        return FqElement(self.spec, self.spec.kneg(self.idx))

    def __mul__(self, other):
        self.spec.same_as(other.spec)
        return FqElement(self.spec, self.spec.kmul(self.idx, other.idx))

    def inverse(self):
        return FqElement(self.spec, self.spec.kinv(self.idx))

    def __pow__(self, n):
        return FqElement(self.spec, self.spec.kpow(self.idx, n))

    def frobenius(self, m=1):
        return FqElement(self.spec, self.spec.kfrob(self.idx, m))

    def is_zero(self):
        return self.idx == 0

    def __eq__(self, other):
        return (isinstance(other, FqElement) and self.spec == other.spec
                and self.idx == other.idx)

    def __hash__(self):
        return hash((self.spec, self.idx))

    def __repr__(self):
        return f"Fq({list(self.coeffs)})"


class OFElement:
    """Element of O_F/pi^precision in canonical form.

    Equality of elements is equality of representations: the digit rows
    are fully reduced, so two OFElements are equal iff their (spec,
    precision, digits) triples coincide.
    """

    __slots__ = ("spec", "precision", "raw", "_ops")

    def __init__(self, spec, digits, precision=None, _raw=None):
        self.spec = spec
        self.precision = spec.default_precision if precision is None else precision
        ops = spec.raw_ops(self.precision)
        self._ops = ops
        if _raw is not None:
            self.raw = _raw
        else:
            self.raw = ops.from_digits(digits)

    @classmethod
    def from_int(cls, spec, n, precision=None):
        precision = spec.default_precision if precision is None else precision
        ops = spec.raw_ops(precision)
        return cls(spec, None, precision, _raw=ops.from_int(n))

    @classmethod
    def from_raw(cls, spec, raw, precision):
        return cls(spec, None, precision, _raw=raw)

    @property
    def digits(self):
        return self._ops.to_digits(self.raw)

    def at_precision(self, prec):
        if prec == self.precision:
            return self
        if prec > self.precision:
            raise ValueError("cannot increase precision of a value")
        ops = self.spec.raw_ops(prec)
        return OFElement.from_raw(self.spec, ops.convert(self._ops, self.raw), prec)

    def _coerce(self, other):
        self.spec.same_as(other.spec)
        n = min(self.precision, other.precision)
        return self.at_precision(n), other.at_precision(n)

    def __add__(self, other):
        a, b = self._coerce(other)
        return OFElement.from_raw(a.spec, a._ops.add(a.raw, b.raw), a.precision)

    def __sub__(self, other):
        a, b = self._coerce(other)
        return OFElement.from_raw(a.spec, a._ops.sub(a.raw, b.raw), a.precision)

    def __neg__(self):
        return OFElement.from_raw(self.spec, self._ops.neg(self.raw), self.precision)

    def __mul__(self, other):
        a, b = self._coerce(other)
        return OFElement.from_raw(a.spec, a._ops.mul(a.raw, b.raw), a.precision)

    def inverse(self):
        return OFElement.from_raw(self.spec, self._ops.inv(self.raw), self.precision)

    def __pow__(self, n):
        return OFElement.from_raw(self.spec, self._ops.pow_int(self.raw, n),
                                  self.precision)

    def val_pi(self):
        """pi-adic valuation in [0, precision]; precision means
        indistinguishable from zero."""
        return self._ops.val(self.raw)

    def is_zero(self):
        return self._ops.is_zero(self.raw)

    def reduce_mod_pi(self):
        return FqElement(self.spec, self._ops.reduce_mod_pi(self.raw))

    def __eq__(self, other):
        return (isinstance(other, OFElement) and self.spec == other.spec
                and self.precision == other.precision and self.raw == other.raw)

    def __hash__(self):
        return hash((self.spec, self.precision, self.raw))

    def __repr__(self):
        return f"OF({[list(r) for r in self.digits]} @ pi^{self.precision})"

    # JSON wire format: {"pi_digits": [[int, ...], ...], "precision": N}
    def to_json(self):
        return {"pi_digits": [list(r) for r in self.digits],
                "precision": self.precision}

    @classmethod
    def from_json(cls, spec, obj):
        return cls(spec, obj["pi_digits"], obj["precision"])


def teichmuller(c, precision=None):
    """Teichmuller lift of a residue-field element: reduces to c mod pi
    and satisfies x^q = x at the requested precision."""
    spec = c.spec
    precision = spec.default_precision if precision is None else precision
    ops = spec.raw_ops(precision)
    return OFElement.from_raw(spec, ops.teich(c.idx), precision)


def uniformizer(spec, precision=None):
    precision = spec.default_precision if precision is None else precision
    ops = spec.raw_ops(precision)
    return OFElement.from_raw(spec, ops.pi_shift_up(ops.one, 1), precision)


# --- presets and config -------------------------------------------------

@lru_cache(maxsize=None)
def _builtin_presets():
    return {
        "q2": LocalFieldSpec(2, 1, 1, (-2, 1), name="q2"),
        "q3": LocalFieldSpec(3, 1, 1, (-3, 1), name="q3"),
        "q4": LocalFieldSpec(2, 2, 1, (-2, 1), unram_poly=(1, 1, 1), name="q4"),
        "q9": LocalFieldSpec(3, 2, 1, (-3, 1), unram_poly=(1, 0, 1), name="q9"),
        "q2e2": LocalFieldSpec(2, 1, 2, (-2, 0, 1), name="q2e2"),
    }


def preset_names():
    return sorted(_builtin_presets())


def spec_from_config(cfg, name=None):
    """Build a LocalFieldSpec from a JSON/TOML-style mapping with keys
    p, d, e, eisenstein and optionally unram_poly, default_precision."""
    return LocalFieldSpec(
        int(cfg["p"]), int(cfg["d"]), int(cfg["e"]),
        cfg["eisenstein"],
        unram_poly=cfg.get("unram_poly"),
        default_precision=int(cfg.get("default_precision", 8)),
        name=cfg.get("name", name),
    )


def load_preset(name, preset_dir=None):
    """Resolve a preset by name: builtins first, then *.json / *.toml files
    in preset_dir (e.g. from the LT_FORGE_PRESET_DIR environment variable)."""
    builtin = _builtin_presets()
    if name in builtin:
        return builtin[name]
    if preset_dir:
        import os
        for ext in (".json", ".toml"):
            path = os.path.join(preset_dir, name + ext)
            if os.path.exists(path):
                if ext == ".json":
                    with open(path, "r", encoding="utf-8") as fh:
                        cfg = json.load(fh)
                else:
                    try:
                        import tomllib
                    except ImportError:
                        import tomli as tomllib
                    with open(path, "rb") as fh:
                        cfg = tomllib.load(fh)
                return spec_from_config(cfg, name=name)
    raise KeyError(f"unknown preset {name!r}; builtins: {', '.join(preset_names())}")
