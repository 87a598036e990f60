"""Buchberger's algorithm for submodules of free modules over k[x_1..x_n].

Vectors are sparse dicts ``{(pos, exp): coeff}`` where ``exp`` is an exponent
tuple and ``coeff`` a raw field value.  An ideal is the special case in which
every term sits at position 0.  Term orders are plain key functions returning
tuples of ints (larger key = larger term).
"""

from __future__ import annotations

import heapq
from functools import lru_cache


def grevlex_key(exp):
    return (sum(exp),) + tuple(-e for e in reversed(exp))


def make_monomial_key(nvars, block=None):
    """Grevlex, or a block order with the variables in ``block`` dominating."""
    if not block:
        return grevlex_key
    block = sorted(block)
    rest = [i for i in range(nvars) if i not in set(block)]

    def key(exp):
        return grevlex_key(tuple(exp[i] for i in block)) + grevlex_key(tuple(exp[i] for i in rest))

    return key


class TermOrder:
    """Position-over-term order; ``pos_rank[p]`` larger means more significant."""

    def __init__(self, mono_key, pos_rank=None):
        self.mono_key = mono_key
        self.pos_rank = pos_rank
        self._cache = {}

    def key(self, term):
        k = self._cache.get(term)
        if k is None:
            pos, exp = term
            rank = pos if self.pos_rank is None else self.pos_rank[pos]
            k = (rank,) + self.mono_key(exp)
            self._cache[term] = k
        return k

    def neg_key(self, term):
        return tuple(-v for v in self.key(term))


def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _exp_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _exp_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def lead_term(vec, order):
    return max(vec, key=order.key)


def make_monic(vec, F, order):
    lt = lead_term(vec, order)
    c = vec[lt]
    if c == F.one:
        return lt, vec
    inv = F.inv(c)
    return lt, {t: F.mul(v, inv) for t, v in vec.items()}


def _sub_multiple(p, heap, order, g, shift, c, F):
    """p -= c * x^shift * g, pushing newly created terms onto the heap."""
    mul, sub = F.mul, F.sub
    for (pos, e), v in g.items():
        t = (pos, _exp_add(e, shift))
        old = p.get(t)
        if old is None:
            p[t] = F.neg(mul(c, v))
            heapq.heappush(heap, (order.neg_key(t), t))
        else:
            nv = sub(old, mul(c, v))
            if nv == 0:
                del p[t]
            else:
                p[t] = nv


def reduce_vector(vec, basis, F, order, full=True):
    """Remainder of ``vec`` modulo ``basis`` (a list of (lead_term, monic vec))."""
    p = dict(vec)
    heap = [(order.neg_key(t), t) for t in p]
    heapq.heapify(heap)
    rem = {}
    by_pos = {}
    for lt, g in basis:
        by_pos.setdefault(lt[0], []).append((lt[1], g))
    while heap:
        _, t = heapq.heappop(heap)
        c = p.pop(t, None)
        if c is None:
            continue
        pos, e = t
        for le, g in by_pos.get(pos, ()):
            if _divides(le, e):
                # g is monic; remove its lead contribution explicitly
                _sub_multiple(p, heap, order, g, _exp_sub(e, le), c, F)
                p.pop(t, None)
                break
        else:
            rem[t] = c
            if not full:
                rem.update(p)
                return rem
    return rem


def groebner(gens, F, order, degree, is_ideal=False):
    """Reduced Groebner basis of the submodule generated by ``gens``.

    ``degree(term)`` is a grading used only for sugar-based pair selection.
    Returns a list of (lead_term, monic vec), sorted with the largest lead first.
    """
    basis = []
    sugar = []
    pairs = []
    pending = set()

    def vec_sugar(v):
        return max(degree(t) for t in v)

    def add(lt, v, sg):
        k = len(basis)
        basis.append((lt, v))
        sugar.append(sg)
        pos, e = lt
        for i in range(k):
            lti = basis[i][0]
            if lti[0] != pos:
                continue
            l = _lcm(lti[1], e)
            if is_ideal and l == _exp_add(lti[1], e):
                continue  # coprime leads
            lterm = (pos, l)
            s = max(sugar[i] + degree((pos, _exp_sub(l, lti[1]))) - degree((pos, tuple(0 for _ in l))),
                    sg + degree((pos, _exp_sub(l, e))) - degree((pos, tuple(0 for _ in l))))
            heapq.heappush(pairs, (s, order.key(lterm), i, k))
            pending.add((i, k))

    for g in gens:
        if not g:
            continue
        r = reduce_vector(g, basis, F, order)
        if not r:
            continue
        lt, v = make_monic(r, F, order)
        if is_ideal and not any(lt[1]):
            return [(lt, {lt: F.one})]
        add(lt, v, vec_sugar(v))

    while pairs:
        _, _, i, j = heapq.heappop(pairs)
        pending.discard((i, j))
        (lti, gi), (ltj, gj) = basis[i], basis[j]
        l = _lcm(lti[1], ltj[1])
        if _chain_skip(i, j, lti[0], l, basis, pending):
            continue
        spoly = {}
        si, sj = _exp_sub(l, lti[1]), _exp_sub(l, ltj[1])
        for (pos, e), v in gi.items():
            spoly[(pos, _exp_add(e, si))] = v
        for (pos, e), v in gj.items():
            t = (pos, _exp_add(e, sj))
            nv = F.sub(spoly.get(t, F.zero), v)
            if nv == 0:
                spoly.pop(t, None)
            else:
                spoly[t] = nv
        if not spoly:
            continue
        r = reduce_vector(spoly, basis, F, order)
        if not r:
            continue
        lt, v = make_monic(r, F, order)
        if is_ideal and not any(lt[1]):
            return [(lt, {lt: F.one})]
        add(lt, v, vec_sugar(v))

    return interreduce(basis, F, order)


def _chain_skip(i, j, pos, l, basis, pending):
    for k, (ltk, _) in enumerate(basis):
        if k == i or k == j or ltk[0] != pos:
            continue
        if not _divides(ltk[1], l):
            continue
        a = (i, k) if i < k else (k, i)
        b = (j, k) if j < k else (k, j)
        if a not in pending and b not in pending:
            return True
    return False


def interreduce(basis, F, order):
    keep = []
    leads = [lt for lt, _ in basis]
    for idx, (lt, v) in enumerate(basis):
        redundant = False
        for jdx, other in enumerate(leads):
            if jdx == idx or other[0] != lt[0] or not _divides(other[1], lt[1]):
                continue
            if other != lt or jdx < idx:
                redundant = True
                break
        if not redundant:
            keep.append((lt, v))
    out = []
    for idx, (lt, v) in enumerate(keep):
        others = keep[:idx] + keep[idx + 1:]
        tail = {t: c for t, c in v.items() if t != lt}
        r = reduce_vector(tail, others, F, order)
        r[lt] = F.one
        out.append((lt, r))
    out.sort(key=lambda item: order.key(item[0]), reverse=True)
    return out


def spoly_reduces_to_zero(basis, F, order):
    """Buchberger criterion check: every S-polynomial reduces to zero."""
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            (lti, gi), (ltj, gj) = basis[i], basis[j]
            if lti[0] != ltj[0]:
                continue
            l = _lcm(lti[1], ltj[1])
            si, sj = _exp_sub(l, lti[1]), _exp_sub(l, ltj[1])
            s = {}
            for (pos, e), v in gi.items():
                s[(pos, _exp_add(e, si))] = v
            for (pos, e), v in gj.items():
                t = (pos, _exp_add(e, sj))
                nv = F.sub(s.get(t, F.zero), v)
                if nv == 0:
                    s.pop(t, None)
                else:
                    s[t] = nv
            if reduce_vector(s, basis, F, order):
                return False
    return True
