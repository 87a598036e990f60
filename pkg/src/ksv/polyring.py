"""Weighted polynomial rings and the homogeneous-ideal toolkit built on the Gröbner engine."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property

from . import _groebner as gb
from .scalars import QQ, Field


class PolyRing:
    """k[x_1..x_n] with a positive integer weight on each variable.

    The symmetric algebra S uses even weights (``|e_i| + 1``); auxiliary rings
    (enveloping rings, base rings of Koszul complexes, Rabinowitsch rings) may
    use any positive weights.
    """

    def __init__(self, names, weights=None, field: Field = QQ, even=False):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"variable names must be distinct: {names}")
        weights = tuple(weights) if weights is not None else (1,) * len(names)
        if len(weights) != len(names):
            raise ValueError("one weight per variable is required")
        for w in weights:
            if not isinstance(w, int) or w <= 0:
                raise ValueError(f"weights must be positive integers, got {weights}")
            if even and w % 2:
                raise ValueError(f"weights of S must be even, got {weights}")
        self.names = names
        self.weights = weights
        self.field = field
        self.nvars = len(names)

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.names == other.names
                and self.weights == other.weights and self.field == other.field)

    def __hash__(self):
        return hash((self.names, self.weights, self.field))

    def __repr__(self):
        w = ",".join(map(str, self.weights))
        return f"{self.field}[{','.join(self.names)}; w={w}]"

    @property
    def gens(self):
        return [self.var(i) for i in range(self.nvars)]

    def var(self, i):
        if isinstance(i, str):
            i = self.names.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): self.field.one})

    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return self.constant(1)

    def constant(self, c):
        c = self.field.convert(c)
        return Polynomial(self, {} if c == 0 else {(0,) * self.nvars: c})

    def monomial(self, exp, c=1):
        c = self.field.convert(c)
        return Polynomial(self, {} if c == 0 else {tuple(exp): c})

    def exp_degree(self, exp):
        return sum(w * e for w, e in zip(self.weights, exp))

    def parse(self, text: str) -> "Polynomial":
        from .dsl import parse_polynomial
        return parse_polynomial(text, self)

    def __call__(self, value):
        if isinstance(value, Polynomial):
            if value.ring != self:
                raise ValueError("polynomial belongs to a different ring")
            return value
        if isinstance(value, str):
            return self.parse(value)
        return self.constant(value)

    def extend(self, names, weights=None, front=True):
        """A ring with extra variables (placed first by default)."""
        names = tuple(names)
        weights = tuple(weights) if weights is not None else (1,) * len(names)
        if front:
            return PolyRing(names + self.names, weights + self.weights, self.field)
        return PolyRing(self.names + names, self.weights + weights, self.field)


def symmetric_ring(c, degrees=None, field=QQ, prefix="chi"):
    """S = k[chi_1..chi_c] with chi_i in upper degree |e_i| + 1."""
    degrees = degrees or (1,) * c
    if any(d <= 0 or d % 2 == 0 for d in degrees):
        raise ValueError(f"exterior generators need positive odd degrees, got {degrees}")
    return PolyRing([f"{prefix}{i + 1}" for i in range(c)], [d + 1 for d in degrees], field, even=True)


class Polynomial:
    """Sparse polynomial: ``{exponent tuple: nonzero raw coefficient}``."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # arithmetic -----------------------------------------------------------
    def _other(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.constant(other)

    def __add__(self, other):
        other = self._other(other)
        F = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = F.add(out.get(e, F.zero), c)
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.ring.field
        return Polynomial(self.ring, {e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        other = self._other(other)
        F = self.ring.field
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = F.add(out.get(e, F.zero), F.mul(c1, c2))
                if v == 0:
                    out.pop(e, None)
                else:
                    out[e] = v
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        F = self.ring.field
        c = F.convert(c)
        if c == 0:
            return self.ring.zero()
        return Polynomial(self.ring, {e: F.mul(v, c) for e, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            try:
                other = self.ring.constant(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # structure ------------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.field.zero)

    def degrees(self):
        return {self.ring.exp_degree(e) for e in self.terms}

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    def degree(self):
        """Weighted degree; None for the zero polynomial, error if inhomogeneous."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError(f"{self} is not homogeneous")
        return ds.pop()

    def lead(self, order=None):
        key = order or gb.grevlex_key
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def evaluate(self, point):
        F = self.ring.field
        point = [F.convert(a) for a in point]
        total = F.zero
        for e, c in self.terms.items():
            v = c
            for a, k in zip(point, e):
                if k:
                    v = F.mul(v, pow(a, k) if F.characteristic == 0 else pow(a, k, F.p))
            total = F.add(total, v)
        return total

    def substitute(self, images, ring=None):
        """Ring map sending variable i to ``images[i]`` (polynomials in ``ring``)."""
        ring = ring or images[0].ring
        out = ring.zero()
        cache = {}
        for e, c in self.terms.items():
            term = ring.constant(c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            out = out + term
        return out

    def rename(self, ring, index_map):
        """Embed into ``ring`` sending variable i to variable ``index_map[i]``."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, k in enumerate(e):
                ne[index_map[i]] += k
            out[tuple(ne)] = c
        return Polynomial(ring, out)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: gb.grevlex_key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        F = self.ring.field
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(self.ring.names, e) if k)
            if F.characteristic == 0:
                neg = c < 0
                a = -c if neg else c
            else:
                neg, a = False, c
            coeff = str(a)
            if not mono:
                body = coeff
            elif a == 1:
                body = mono
            else:
                body = f"{coeff}*{mono}"
            parts.append(("-" if neg else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    __repr__ = __str__


# ideals --------------------------------------------------------------------

def _order_for(ring, order):
    if order is None or order == "grevlex":
        return gb.TermOrder(gb.grevlex_key)
    if isinstance(order, tuple) and order[0] == "block":
        idx = [ring.names.index(v) if isinstance(v, str) else v for v in order[1]]
        return gb.TermOrder(gb.make_monomial_key(ring.nvars, idx))
    raise ValueError(f"unknown monomial order {order!r}")


def _to_vec(p):
    return {(0, e): c for e, c in p.terms.items()}


def _from_vec(ring, v):
    return Polynomial(ring, {e: c for (_, e), c in v.items()})


def groebner_basis(gens, order=None, ring=None):
    """Reduced Groebner basis (monic, sorted by decreasing lead) of the ideal."""
    gens = list(gens)
    ring = ring or gens[0].ring
    o = _order_for(ring, order)
    deg = lambda t: sum(t[1])  # sugar uses standard degree
    basis = gb.groebner([_to_vec(g) for g in gens if g], ring.field, o, deg, is_ideal=True)
    return [_from_vec(ring, v) for _, v in basis]


class HomogeneousIdeal:
    """An ideal of a weighted polynomial ring with homogeneous generators."""

    def __init__(self, ring: PolyRing, gens, check=True):
        self.ring = ring
        self.gens = [ring(g) for g in gens]
        self.gens = [g for g in self.gens if g]
        if check:
            for g in self.gens:
                if not g.is_homogeneous():
                    raise ValueError(f"generator {g} is not homogeneous")
        self._bases = {}

    def __repr__(self):
        return f"({', '.join(map(str, self.gens))})"

    def groebner(self, order=None):
        k = order or "grevlex"
        if k not in self._bases:
            self._bases[k] = groebner_basis(self.gens, order, self.ring) if self.gens else []
        return self._bases[k]

    def normal_form(self, f, order=None):
        f = self.ring(f)
        basis = self.groebner(order)
        o = _order_for(self.ring, order)
        vb = [((0, p.lead(o.mono_key)[0]), _to_vec(p)) for p in basis]
        return _from_vec(self.ring, gb.reduce_vector(_to_vec(f), vb, self.ring.field, o))

    def contains(self, f):
        return self.normal_form(f).is_zero()

    __contains__ = contains

    def is_unit(self):
        return any(g.is_constant() for g in self.groebner())

    def is_zero(self):
        return not self.gens

    def __add__(self, other):
        return HomogeneousIdeal(self.ring, self.gens + other.gens, check=False)

    def __mul__(self, other):
        return HomogeneousIdeal(self.ring, [a * b for a in self.gens for b in other.gens], check=False)

    def canonical_gens(self):
        """The reduced grevlex basis rendered as sorted strings."""
        return [str(g) for g in self.groebner()]

    def same_as(self, other):
        return self.canonical_gens() == other.canonical_gens()

    def lead_monomials(self, order=None):
        o = _order_for(self.ring, order)
        return [g.lead(o.mono_key)[0] for g in self.groebner(order)]

    def hilbert_series(self):
        return hilbert_series_monomial([self.lead_monomials()], [0], self.ring.weights)


def eliminate(ideal: HomogeneousIdeal, block, target: PolyRing | None = None):
    """I ∩ k[remaining variables], returned in ``target`` (default: the subring)."""
    ring = ideal.ring
    missing = [v for v in block if isinstance(v, str) and v not in ring.names]
    if missing:
        raise ValueError(f"block {missing} is not a subset of the ring variables")
    idx = []
    for v in block:
        i = ring.names.index(v) if isinstance(v, str) else v
        if not 0 <= i < ring.nvars:
            raise ValueError(f"{v!r} is not a variable of {ring}")
        idx.append(i)
    keep = [i for i in range(ring.nvars) if i not in set(idx)]
    if target is None:
        target = PolyRing([ring.names[i] for i in keep], [ring.weights[i] for i in keep], ring.field)
    if len(keep) != target.nvars:
        raise ValueError("target ring does not match the remaining variables")
    basis = ideal.groebner(("block", tuple(idx))) if ideal.gens else []
    out = []
    for g in basis:
        if all(not any(e[i] for i in idx) for e in g.terms):
            out.append(Polynomial(target, {tuple(e[i] for i in keep): c for e, c in g.terms.items()}))
    return HomogeneousIdeal(target, out, check=False)


def radical_membership(f: Polynomial, ideal: HomogeneousIdeal) -> bool:
    """f ∈ √I via 1 ∈ I + (1 − t·f) in a ring with one fresh variable t."""
    ring = ideal.ring
    f = ring(f)
    if f.is_zero():
        return True
    name = "_t"
    while name in ring.names:
        name += "_"
    big = ring.extend([name], [1], front=False)
    emb = lambda p: p.rename(big, list(range(ring.nvars)))
    t = big.var(ring.nvars)
    gens = [emb(g) for g in ideal.gens] + [big.one() - t * emb(f)]
    basis = groebner_basis(gens, ring=big)
    return any(g.is_constant() for g in basis)


def ideal_intersection(I: HomogeneousIdeal, J: HomogeneousIdeal) -> HomogeneousIdeal:
    """I ∩ J by eliminating t from t·I + (1 − t)·J."""
    ring = I.ring
    if I.is_zero() or J.is_zero():
        return HomogeneousIdeal(ring, [], check=False)
    if I.is_unit():
        return J
    if J.is_unit():
        return I
    name = "_u"
    while name in ring.names:
        name += "_"
    big = ring.extend([name], [1], front=True)
    emb = lambda p: p.rename(big, list(range(1, ring.nvars + 1)))
    t = big.var(0)
    gens = [t * emb(g) for g in I.gens] + [(big.one() - t) * emb(g) for g in J.gens]
    return eliminate(HomogeneousIdeal(big, gens, check=False), [0], target=ring)


# Hilbert series ------------------------------------------------------------

def _minimalize(monos):
    monos = sorted(set(monos), key=sum)
    out = []
    for m in monos:
        if not any(gb._divides(o, m) for o in out):
            out.append(m)
    return out


def _poly_mul(a, b):
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _poly_add(a, b, sign=1):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v}


def _numerator(monos, weights):
    """K-polynomial numerator of S/(monos): HS = N(t) / prod(1 - t^w)."""
    monos = _minimalize(monos)
    if not monos:
        return {0: 1}
    if any(not any(m) for m in monos):
        return {}
    deg = lambda m: sum(w * e for w, e in zip(weights, m))
    # pairwise coprime generators: N = prod (1 - t^deg m)
    support = [frozenset(i for i, e in enumerate(m) if e) for m in monos]
    coprime = all(not (support[i] & support[j])
                  for i in range(len(monos)) for j in range(i + 1, len(monos)))
    if coprime:
        out = {0: 1}
        for m in monos:
            out = _poly_mul(out, {0: 1, deg(m): -1})
        return out
    # pivot on the variable occurring in the most generators
    counts = [0] * len(weights)
    for m in monos:
        for i, e in enumerate(m):
            if e:
                counts[i] += 1
    v = max(range(len(weights)), key=lambda i: counts[i])
    xv = tuple(1 if i == v else 0 for i in range(len(weights)))
    plus = monos + [xv]
    colon = [tuple(max(e - 1, 0) if i == v else e for i, e in enumerate(m)) for m in monos]
    return _poly_add(_numerator(plus, weights),
                     _poly_mul({weights[v]: 1}, _numerator(colon, weights)))


class HilbertSeries:
    """Hilbert series N(t) / prod_i (1 - t^{w_i}) of a graded module.

    ``numerator`` maps (possibly negative) exponents to integer coefficients.
    """

    def __init__(self, numerator, weights):
        self.numerator = {k: v for k, v in numerator.items() if v}
        self.weights = tuple(weights)

    def __repr__(self):
        return f"HilbertSeries({self.numerator_str()} / prod(1-t^w), w={self.weights})"

    def numerator_str(self):
        if not self.numerator:
            return "0"
        return " + ".join(f"{v}*t^{k}" for k, v in sorted(self.numerator.items()))

    def is_zero(self):
        return not self.numerator

    def coefficient(self, d):
        return self.coefficients(d, d)[d]

    def coefficients(self, upto, start=None):
        """dim_k of each degree piece for degrees ``start..upto``."""
        if not self.numerator:
            lo = 0 if start is None else start
            return {d: 0 for d in range(lo, upto + 1)}
        lo = min(self.numerator) if start is None else start
        # series of 1/prod(1 - t^w) up to the needed length
        span = upto - min(self.numerator)
        if span < 0:
            return {d: 0 for d in range(lo, upto + 1)}
        inv = [0] * (span + 1)
        inv[0] = 1
        for w in self.weights:
            for i in range(w, span + 1):
                inv[i] += inv[i - w]
        out = {}
        for d in range(lo, upto + 1):
            out[d] = sum(c * inv[d - k] for k, c in self.numerator.items() if 0 <= d - k <= span)
        return out

    @cached_property
    def krull_dimension(self):
        """Order of the pole at t = 1; -inf for the zero module."""
        if not self.numerator:
            return -math.inf
        shift = min(self.numerator)
        coeffs = [0] * (max(self.numerator) - shift + 1)
        for k, v in self.numerator.items():
            coeffs[k - shift] = v
        # each factor (1 - t^w) contributes one zero at t = 1
        mult = 0
        while sum(coeffs) == 0:
            # divide by (1 - t): synthetic division with root 1
            q, acc = [], 0
            for c in coeffs[:-1]:
                acc += c
                q.append(acc)
            coeffs = q
            mult += 1
        return len(self.weights) - mult

    @property
    def proj_dimension(self):
        d = self.krull_dimension
        return d if d == -math.inf else d - 1


def hilbert_series_monomial(lead_sets, degrees, weights):
    """Series of ⊕_j S(-degrees[j]) / (lead_sets[j])."""
    num = {}
    for monos, d in zip(lead_sets, degrees):
        part = _numerator(list(monos), weights)
        num = _poly_add(num, {k + d: v for k, v in part.items()})
    return HilbertSeries(num, weights)


def hilbert_series(obj):
    """Hilbert series of S/I for an ideal, or of a presented module."""
    if isinstance(obj, HomogeneousIdeal):
        return obj.hilbert_series()
    return obj.hilbert_series()


def enveloping_ring(S: PolyRing, left="y", right="z"):
    """S^e = S ⊗_k S as a 2c-variable ring; returns (S^e, rename_left, rename_right)."""
    taken = set(S.names)
    lnames = [f"{left}{i + 1}" for i in range(S.nvars)]
    rnames = [f"{right}{i + 1}" for i in range(S.nvars)]
    while taken & set(lnames + rnames):
        lnames = ["_" + n for n in lnames]
        rnames = ["_" + n for n in rnames]
    Se = PolyRing(lnames + rnames, S.weights + S.weights, S.field)
    c = S.nvars
    return Se, (lambda p: p.rename(Se, list(range(c)))), (lambda p: p.rename(Se, list(range(c, 2 * c))))
