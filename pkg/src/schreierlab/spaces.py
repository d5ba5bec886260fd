"""Exact evaluation of computable norms on finitely supported vectors.

Base norms (l1, c0), Tsirelson-type implicit norms T(S_a, theta), mixed
Tsirelson and Schlumprecht norms, the derived interval-count norms and
associated admissible/allowable norms, and two-sided dual-norm bounds.

Everything runs in exact rational arithmetic except the Schlumprecht
norm, whose 1/log2(k+1) weights force floats.

The partition suprema are computed by dynamic programs over cut points.
For bimonotone 1-unconditional norms the supremum over admissible
successive sets is attained on gap-free partitions of the interval
support whose piece minima are support points (enlarging a piece to the
right never decreases its norm and never changes its minimum; an initial
segment of the support may be dropped).  Admissibility of the chosen
minima is tracked with the Schreier cursor from
:mod:`schreierlab.families`, with budgets capped at the number of
remaining support points so that the state space stays small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .families import _advance, _start
from .ordinal import Ordinal

__all__ = [
    "SpaceError",
    "FsVector",
    "FsFunctional",
    "C0",
    "L1",
    "Tsirelson",
    "MixedTsirelson",
    "Schlumprecht",
    "Derived",
    "parse_space",
    "norm",
    "norm_n",
    "assoc_norm",
    "dual_norm",
    "dual_assoc_norm",
    "primal_from_dual",
    "Bounds",
]

SUPPORT_BOUND = 256
ALLOWABLE_SUPPORT_BOUND = 20

FREE = ("free",)  # cursor state whose block budget exceeds all remaining cuts


class SpaceError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------


def _coerce(v):
    if isinstance(v, (Fraction, int)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise SpaceError("unsupported coefficient %r" % (v,))


@dataclass(frozen=True)
class FsVector:
    """Finitely supported vector: sorted (index, value) pairs, no zeros."""

    entries: tuple = ()

    def __post_init__(self):
        idx = [i for i, _ in self.entries]
        if idx != sorted(set(idx)) or any(i < 1 for i in idx):
            raise SpaceError("indices must be strictly increasing positive naturals")
        if any(v == 0 for _, v in self.entries):
            raise SpaceError("zero coefficients must not be stored")

    @classmethod
    def from_pairs(cls, pairs):
        cleaned = sorted((i, _coerce(v)) for i, v in pairs if _coerce(v) != 0)
        return cls(tuple(cleaned))

    @classmethod
    def basis(cls, i):
        return cls(((i, Fraction(1)),))

    @classmethod
    def indicator(cls, indices, value=Fraction(1)):
        value = _coerce(value)
        return cls.from_pairs((i, value) for i in indices)

    @classmethod
    def average(cls, indices):
        indices = sorted(indices)
        return cls.indicator(indices, Fraction(1, len(indices)))

    # -- views ----------------------------------------------------------

    @property
    def support(self):
        return tuple(i for i, _ in self.entries)

    @property
    def values(self):
        return tuple(v for _, v in self.entries)

    def is_zero(self):
        return not self.entries

    def min_support(self):
        return self.entries[0][0]

    def max_support(self):
        return self.entries[-1][0]

    def interval_support(self):
        if self.is_zero():
            raise SpaceError("zero vector has no interval support")
        return (self.min_support(), self.max_support())

    def __getitem__(self, i):
        for j, v in self.entries:
            if j == i:
                return v
        return Fraction(0)

    # -- algebra --------------------------------------------------------

    def scale(self, c):
        c = _coerce(c)
        if c == 0:
            return FsVector()
        return FsVector(tuple((i, v * c) for i, v in self.entries))

    def __add__(self, other):
        acc = dict(self.entries)
        for i, v in other.entries:
            acc[i] = acc.get(i, 0) + v
        return FsVector.from_pairs(acc.items())

    def __sub__(self, other):
        return self + other.scale(-1)

    def restrict(self, indices):
        """Restriction to a set of indices (iterable) or an (lo, hi) pair."""
        if isinstance(indices, tuple) and len(indices) == 2 and all(
                isinstance(t, int) for t in indices):
            lo, hi = indices
            keep = lambda i: lo <= i <= hi
        else:
            s = set(indices)
            keep = lambda i: i in s
        return FsVector(tuple((i, v) for i, v in self.entries if keep(i)))

    def pair(self, other):
        """Duality pairing sum_i self_i * other_i."""
        d = dict(other.entries)
        return sum((v * d[i] for i, v in self.entries if i in d), Fraction(0))

    def to_json(self):
        return [[i, str(v) if isinstance(v, Fraction) else v] for i, v in self.entries]

    def __str__(self):
        return " + ".join("%s*e%d" % (v, i) for i, v in self.entries) or "0"


FsFunctional = FsVector  # biorthogonal coordinates share the representation


# ---------------------------------------------------------------------------
# Space descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class C0:
    def __str__(self):
        return "C0"


@dataclass(frozen=True)
class L1:
    def __str__(self):
        return "L1"


@dataclass(frozen=True)
class Tsirelson:
    alpha: Ordinal
    theta: Fraction

    def __post_init__(self):
        if not (0 < self.theta < 1):
            raise SpaceError("theta must lie in (0,1)")

    def __str__(self):
        return "T(S(%s),%s)" % (self.alpha, self.theta)


@dataclass(frozen=True)
class MixedTsirelson:
    levels: tuple  # of (alpha, theta)

    def __str__(self):
        return "MT[%s]" % ",".join("(S(%s),%s)" % (a, t) for a, t in self.levels)


@dataclass(frozen=True)
class Schlumprecht:
    def __str__(self):
        return "SCHL"


@dataclass(frozen=True)
class Derived:
    base: object
    kind: tuple  # ("nn", n) | ("assoc", alpha, "admissible"|"allowable")

    def __str__(self):
        if self.kind[0] == "nn":
            return "NN(%s,%d)" % (self.base, self.kind[1])
        variant = "adm" if self.kind[2] == "admissible" else "allow"
        return "ASSOC(%s,S(%s),%s)" % (self.base, self.kind[1], variant)


def is_unconditional(space):
    """True when the norm is known 1-unconditional (all built-in norms
    are: they depend only on the absolute values of the coefficients)."""
    if isinstance(space, Derived):
        return is_unconditional(space.base)
    return isinstance(space, (C0, L1, Tsirelson, MixedTsirelson, Schlumprecht))


def space_mode(space):
    if isinstance(space, Schlumprecht):
        return "float"
    if isinstance(space, Derived):
        return space_mode(space.base)
    return "exact"


def parse_space(text):
    from .ordinal import parse as parse_ordinal

    text = text.strip().replace(" ", "")

    def expr(s, i):
        if s.startswith("C0", i):
            return C0(), i + 2
        if s.startswith("L1", i):
            return L1(), i + 2
        if s.startswith("SCHL", i):
            return Schlumprecht(), i + 4
        if s.startswith("T(S(", i):
            j = s.index(")", i + 4)
            alpha = parse_ordinal(s[i + 4:j])
            k = s.index(")", j + 1)
            theta = Fraction(s[j + 2:k])
            return Tsirelson(alpha, theta), k + 1
        if s.startswith("MT[", i):
            j = s.index("]", i)
            body = s[i + 3:j]
            levels = []
            for part in body.replace("),(", ")|(").split("|"):
                part = part.strip("()")
                fam_part, theta_part = part.rsplit(",", 1)
                alpha = parse_ordinal(fam_part[2:-1])
                levels.append((alpha, Fraction(theta_part)))
            return MixedTsirelson(tuple(levels)), j + 1
        if s.startswith("NN(", i):
            base, i2 = expr(s, i + 3)
            j = s.index(")", i2)
            return Derived(base, ("nn", int(s[i2 + 1:j]))), j + 1
        if s.startswith("ASSOC(", i):
            base, i2 = expr(s, i + 6)
            if not s.startswith(",S(", i2):
                raise SpaceError("expected ,S(<ordinal>) in ASSOC")
            j = s.index(")", i2 + 3)
            alpha = parse_ordinal(s[i2 + 3:j])
            tail = s[j + 1:]
            if tail.startswith(",adm)"):
                variant, end = "admissible", j + 6
            elif tail.startswith(",allow)"):
                variant, end = "allowable", j + 8
            else:
                raise SpaceError("expected ,adm) or ,allow) in ASSOC")
            return Derived(base, ("assoc", alpha, variant)), end
        raise SpaceError("cannot parse space descriptor at %r" % s[i:])

    try:
        sp, end = expr(text, 0)
    except SpaceError:
        raise
    except (ValueError, IndexError, ZeroDivisionError) as exc:
        raise SpaceError("malformed space descriptor %r: %s" % (text, exc))
    if end != len(text):
        raise SpaceError("trailing input in space descriptor %r" % text[end:])
    return sp


# ---------------------------------------------------------------------------
# Schreier-cursor helpers with budget capping
# ---------------------------------------------------------------------------


def _cap(state, remaining):
    """Collapse a cursor state whose top-level block budget covers all
    remaining cut candidates: such a state accepts any future pattern,
    since every element can open a fresh block and a fresh block always
    accepts its first element."""
    if state == FREE or state == ("one",):
        return state
    left = state[2]
    if left >= remaining:
        return FREE
    return state


def _cursor_start(alpha, n, remaining):
    return set(_cap(s, remaining) for s in _start(alpha, n))


def _cursor_advance(state, n, remaining):
    if state == FREE:
        return {FREE}
    return set(_cap(s, remaining) for s in _advance(state, n))


# ---------------------------------------------------------------------------
# Norm evaluation
# ---------------------------------------------------------------------------


class _Evaluator:
    """Per-vector memoized evaluator for one implicit-norm space."""

    def __init__(self, space, x):
        if len(x.entries) > SUPPORT_BOUND:
            raise SpaceError("support %d exceeds bound %d" % (len(x.entries), SUPPORT_BOUND))
        self.space = space
        self.sp = x.support
        self.vals = x.values
        self.float_mode = space_mode(space) == "float"
        self._seg = {}
        self._chain = {}
        self._count = {}

    # segment [i..j] in support-point positions, inclusive
    def seg_norm(self, i, j):
        key = (i, j)
        if key in self._seg:
            return self._seg[key]
        peak = max(abs(self.vals[t]) for t in range(i, j + 1))
        best = peak
        space = self.space
        if isinstance(space, Tsirelson):
            v = space.theta * self.split_admissible(i, j, space.alpha)
            if v > best:
                best = v
        elif isinstance(space, MixedTsirelson):
            for alpha, theta in space.levels:
                v = theta * self.split_admissible(i, j, alpha)
                if v > best:
                    best = v
        elif isinstance(space, Schlumprecht):
            best = float(best)
            for k in range(2, j - i + 2):
                v = self.split_exact_count(i, j, k) / math.log2(k + 1)
                if v > best:
                    best = v
        else:
            raise SpaceError("seg_norm only for implicit-norm spaces")
        self._seg[key] = best
        return best

    # best sum over >= 2 admissible pieces inside [i..j]; first piece may
    # start after i (dropped prefix), pieces are gap-free afterwards
    def split_admissible(self, i, j, alpha):
        best = Fraction(0) if not self.float_mode else 0.0
        for l in range(i, j):  # second cut must exist, so l < j
            remaining = j - l
            for s in _cursor_start(alpha, self.sp[l], remaining):
                for m in range(l + 1, j + 1):
                    for s2 in _cursor_advance(s, self.sp[m], j - m):
                        v = self.seg_norm(l, m - 1) + self._chain_from(m, s2, j, alpha)
                        if v > best:
                            best = v
        return best

    def _chain_from(self, l, state, j, alpha):
        """Best piece-sum for cuts continuing at position l (cut just made
        there, cursor state after feeding sp[l]) up to position j."""
        key = (l, state, j, alpha)
        if key in self._chain:
            return self._chain[key]
        best = self.seg_norm(l, j)  # close: piece [l..j]
        for m in range(l + 1, j + 1):
            for s2 in _cursor_advance(state, self.sp[m], j - m):
                v = self.seg_norm(l, m - 1) + self._chain_from(m, s2, j, alpha)
                if v > best:
                    best = v
        self._chain[key] = best
        return best

    # best sum over exactly k successive pieces covering [i..j]
    def split_exact_count(self, i, j, k):
        key = (i, j, k)
        if key in self._count:
            return self._count[key]
        if k == 1:
            r = self.seg_norm(i, j)
        elif k > j - i + 1:
            r = -math.inf if self.float_mode else None
        else:
            r = None
            for m in range(i + 1, j + 1):
                tail = self.split_exact_count(m, j, k - 1)
                if tail is None:
                    continue
                v = self.seg_norm(i, m - 1) + tail
                if r is None or v > r:
                    r = v
            if r is None and self.float_mode:
                r = -math.inf
        self._count[key] = r
        return r


def norm(space, x):
    """Norm of x in the given space (exact Fraction unless float mode)."""
    if isinstance(space, Derived):
        kind = space.kind
        if kind[0] == "nn":
            return norm_n(space.base, kind[1], x)
        return assoc_norm(space.base, kind[1], x, kind[2])
    if x.is_zero():
        return Fraction(0) if space_mode(space) == "exact" else 0.0
    if isinstance(space, C0):
        return max(abs(v) for v in x.values)
    if isinstance(space, L1):
        return sum(abs(v) for v in x.values)
    ev = _Evaluator(space, x)
    return ev.seg_norm(0, len(x.entries) - 1)


# ---------------------------------------------------------------------------
# Derived norms
# ---------------------------------------------------------------------------


def _piece_table(space, x):
    """seg -> base-norm lookup for DP over pieces of x's support points.

    For implicit-norm spaces a single shared evaluator is used: the norm
    of a restriction to an interval equals the evaluator's segment norm,
    and sharing the memo across pieces avoids re-deriving overlapping
    subsegments."""
    if isinstance(space, (Tsirelson, MixedTsirelson, Schlumprecht)):
        return _Evaluator(space, x).seg_norm
    sp = x.support
    memo = {}

    def piece(i, j):
        key = (i, j)
        if key not in memo:
            memo[key] = norm(space, x.restrict((sp[i], sp[j])))
        return memo[key]

    return piece


def norm_n(space, n, y):
    """sup of sums of piece norms over at most n successive intervals."""
    if n < 1:
        raise SpaceError("interval count must be >= 1")
    if y.is_zero():
        return norm(space, y)
    sp = y.support
    piece = _piece_table(space, y)
    P = len(sp)
    memo = {}

    def best(i, r):
        # cover [i..end] with <= r pieces; dropping never helps for
        # bimonotone norms, so pieces tile the remaining support
        key = (i, r)
        if key in memo:
            return memo[key]
        v = piece(i, P - 1)
        if r > 1:
            for m in range(i + 1, P):
                w = piece(i, m - 1) + best(m, r - 1)
                if w > v:
                    v = w
        memo[key] = v
        return v

    return best(0, min(n, P))


def assoc_norm(space, alpha, x, variant="admissible"):
    """Associated norm: sup of piece-norm sums over alpha-admissible
    successive intervals (or alpha-allowable disjoint sets)."""
    if isinstance(alpha, int):
        alpha = Ordinal.from_int(alpha)
    if x.is_zero():
        return norm(space, x)
    if variant == "allowable":
        return _assoc_allowable(space, alpha, x)
    if variant != "admissible":
        raise SpaceError("variant must be admissible or allowable")
    sp = x.support
    P = len(sp)
    piece = _piece_table(space, x)
    memo = {}

    def chain(l, state):
        key = (l, state)
        if key in memo:
            return memo[key]
        best = piece(l, P - 1)
        for m in range(l + 1, P):
            for s2 in _cursor_advance(state, sp[m], P - 1 - m):
                v = piece(l, m - 1) + chain(m, s2)
                if v > best:
                    best = v
        memo[key] = best
        return best

    out = None
    for l in range(P):
        for s in _cursor_start(alpha, sp[l], P - 1 - l):
            v = chain(l, s)
            if out is None or v > out:
                out = v
    return out


def _assoc_allowable(space, alpha, x):
    """Exhaustive search over families of pairwise disjoint pieces whose
    minima form an S_alpha set.  Exponential; guarded by support size."""
    sp = x.support
    P = len(sp)
    if P > ALLOWABLE_SUPPORT_BOUND:
        raise SpaceError("allowable variant limited to support <= %d"
                         % ALLOWABLE_SUPPORT_BOUND)
    best = [norm(space, x.restrict(((sp[0]), sp[-1])))]  # single piece floor

    def value(pieces):
        return sum((norm(space, x.restrict(p)) for p in pieces),
                   Fraction(0) if space_mode(space) == "exact" else 0.0)

    def rec(pos, pieces, states):
        if pos == P:
            if pieces:
                v = value(pieces)
                if v > best[0]:
                    best[0] = v
            return
        e = sp[pos]
        rec(pos + 1, pieces, states)  # drop this support point
        for k in range(len(pieces)):  # join an existing piece
            pieces[k].append(e)
            rec(pos + 1, pieces, states)
            pieces[k].pop()
        # open a new piece with minimum e
        nxt = (_cursor_start(alpha, e, P - 1 - pos) if states is None else
               _cursor_advance_set(states, e, P - 1 - pos))
        if nxt:
            pieces.append([e])
            rec(pos + 1, pieces, nxt)
            pieces.pop()

    rec(0, [], None)
    return best[0]


def _cursor_advance_set(states, n, remaining):
    out = set()
    for s in states:
        out.update(_cursor_advance(s, n, remaining))
    return out


# ---------------------------------------------------------------------------
# Dual norms: certified two-sided bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    lower: object
    upper: object

    @property
    def exact(self):
        return self.lower == self.upper

    def __add__(self, other):
        return Bounds(self.lower + other.lower, self.upper + other.upper)

    def scale(self, c):
        return Bounds(self.lower * c, self.upper * c)

    def to_json(self):
        fmt = lambda v: str(v) if isinstance(v, Fraction) else v
        return {"lower": fmt(self.lower), "upper": fmt(self.upper), "exact": self.exact}


def _section_of(phi, section):
    if section is not None:
        return section
    if phi.is_zero():
        return (1, 1)
    return phi.interval_support()


def dual_norm(space, phi, section=None, pattern_bound=12):
    """Bounds on the dual norm of phi over a finite section.

    Exact for c0 (dual l1) and l1 (dual linf).  Otherwise: certified
    lower bound from witness vectors (sign patterns over subsets of the
    support, basis vectors), upper bound sum|phi_i| (valid since the
    basis is bimonotone and normalized).
    """
    if phi.is_zero():
        z = Fraction(0)
        return Bounds(z, z)
    if isinstance(space, C0):
        v = sum(abs(c) for c in phi.values)
        return Bounds(v, v)
    if isinstance(space, L1):
        v = max(abs(c) for c in phi.values)
        return Bounds(v, v)
    lo, hi = _section_of(phi, section)
    sub = phi.restrict((lo, hi))
    if sub.is_zero():
        z = Fraction(0)
        return Bounds(z, z)
    upper = sum(abs(c) for c in sub.values)
    lower = Fraction(0)
    supp = sub.support
    if len(supp) <= pattern_bound:
        import itertools
        for r in range(1, len(supp) + 1):
            for S in itertools.combinations(supp, r):
                xw = FsVector.from_pairs(
                    (i, 1 if sub[i] >= 0 else -1) for i in S)
                ratio = sub.pair(xw) / norm(space, xw)
                if ratio > lower:
                    lower = ratio
    else:
        for i in supp:
            v = abs(sub[i])
            if v > lower:
                lower = v
    return Bounds(lower, upper)


def dual_assoc_norm(space, phi, n=None, alpha=None, variant="admissible",
                    section=None):
    """Bounds on the derived dual norm: outer sup over interval partitions
    (count-limited for the n-variant, admissible for the alpha-variant)
    of sums of per-piece dual norms."""
    if (n is None) == (alpha is None):
        raise SpaceError("give exactly one of n and alpha")
    if phi.is_zero():
        z = Fraction(0)
        return Bounds(z, z)
    lo, hi = _section_of(phi, section)
    sub = phi.restrict((lo, hi))
    if sub.is_zero():
        z = Fraction(0)
        return Bounds(z, z)
    sp = sub.support
    P = len(sp)

    piece_bounds = {}

    def piece(i, j):
        if (i, j) not in piece_bounds:
            piece_bounds[(i, j)] = dual_norm(space, sub.restrict((sp[i], sp[j])))
        return piece_bounds[(i, j)]

    def run(side):
        val = lambda b: getattr(b, side)
        if n is not None:
            memo = {}

            def best(i, r):
                key = (i, r)
                if key in memo:
                    return memo[key]
                v = val(piece(i, P - 1))
                if r > 1:
                    for m in range(i + 1, P):
                        w = val(piece(i, m - 1)) + best(m, r - 1)
                        if w > v:
                            v = w
                memo[key] = v
                return v

            return best(0, min(n, P))
        a = Ordinal.from_int(alpha) if isinstance(alpha, int) else alpha
        memo = {}

        def chain(l, state):
            key = (l, state)
            if key in memo:
                return memo[key]
            best = val(piece(l, P - 1))
            for m in range(l + 1, P):
                for s2 in _cursor_advance(state, sp[m], P - 1 - m):
                    v = val(piece(l, m - 1)) + chain(m, s2)
                    if v > best:
                        best = v
            memo[key] = best
            return best

        out = None
        for l in range(P):
            for s in _cursor_start(a, sp[l], P - 1 - l):
                v = chain(l, s)
                if out is None or v > out:
                    out = v
        return out

    if variant == "allowable":
        raise SpaceError("allowable dual bounds are not implemented")
    return Bounds(run("lower"), run("upper"))


def minimax_admissible_cover(space, x, alpha):
    """min over alpha-admissible gap-free covers of supp x of the largest
    piece norm; the first piece must start at min supp."""
    if isinstance(alpha, int):
        alpha = Ordinal.from_int(alpha)
    sp = x.support
    P = len(sp)
    piece = _piece_table(space, x)
    memo = {}

    def chain(l, state):
        key = (l, state)
        if key in memo:
            return memo[key]
        best = piece(l, P - 1)
        for m in range(l + 1, P):
            for s2 in _cursor_advance(state, sp[m], P - 1 - m):
                v = max(piece(l, m - 1), chain(m, s2))
                if v < best:
                    best = v
        memo[key] = best
        return best

    out = None
    for s in _cursor_start(alpha, sp[0], P - 1):
        v = chain(0, s)
        if out is None or v < out:
            out = v
    return out


def primal_from_dual(space, x, n=None, alpha=None, variant="admissible",
                     candidates=None, section=None, pattern_bound=12):
    """Bounds on the dual-derived primal norm sup{phi(x): derived dual
    norm of phi <= 1}.

    Lower bound: phi(x)/upper(|phi|*) over candidate functionals (sign
    patterns on the support plus any caller-supplied functionals).
    Upper bound: the base norm of x, refined for the alpha-variant by the
    min-max admissible-cover bound.
    """
    if x.is_zero():
        z = Fraction(0)
        return Bounds(z, z)
    cands = []
    supp = x.support
    if len(supp) <= pattern_bound:
        import itertools
        for r in range(1, len(supp) + 1):
            for S in itertools.combinations(supp, r):
                cands.append(FsVector.from_pairs(
                    (i, 1 if x[i] >= 0 else -1) for i in S))
    else:
        cands.extend(FsVector.basis(i) for i in supp)
    if candidates:
        cands.extend(candidates)
    lower = Fraction(0)
    for phi in cands:
        v = phi.pair(x)
        if v <= 0:
            continue
        db = dual_assoc_norm(space, phi, n=n, alpha=alpha, variant=variant,
                             section=section)
        if db.upper > 0:
            r = v / db.upper
            if r > lower:
                lower = r
    upper = norm(space, x)
    if alpha is not None:
        cover = minimax_admissible_cover(space, x, alpha)
        if cover < upper:
            upper = cover
    return Bounds(lower, upper)
