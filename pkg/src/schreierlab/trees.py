"""Finite well-founded trees, block trees with equivalence certificates,
and the bridge from certified trees to combinatorial families.

A tree is stored as its set of nonempty nodes (finite sequences closed
under initial segments); the empty sequence is always implicitly present
as the root and is not counted by the order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .families import Family, explicit_family
from .spaces import FsVector, norm, space_mode

__all__ = [
    "TreeError",
    "FiniteTree",
    "BlockTree",
    "TreeCertificate",
    "TreeViolation",
    "SearchFailure",
    "derivative",
    "order",
    "family_as_tree",
    "certify_block_tree",
    "tree_to_family",
    "index_lower_bound_search",
]

PATTERN_BOUND = 12


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteTree:
    """Prefix-closed set of nonempty finite sequences."""

    nodes: frozenset = frozenset()

    def __post_init__(self):
        for t in self.nodes:
            if not isinstance(t, tuple) or len(t) == 0:
                raise TreeError("nodes must be nonempty tuples, got %r" % (t,))
            if len(t) > 1 and t[:-1] not in self.nodes:
                raise TreeError("not prefix-closed at %r" % (t,))

    @classmethod
    def from_sequences(cls, seqs):
        """Tree generated by the given sequences (prefix closure taken)."""
        nodes = set()
        for s in seqs:
            s = tuple(s)
            for k in range(1, len(s) + 1):
                nodes.add(s[:k])
        return cls(frozenset(nodes))

    @classmethod
    def chain(cls, labels):
        return cls.from_sequences([tuple(labels)])

    def is_empty(self):
        return not self.nodes

    def branches(self):
        """Maximal nodes, sorted for determinism."""
        out = [t for t in self.nodes
               if not any(len(u) == len(t) + 1 and u[:-1] == t for u in self.nodes)]
        try:
            return sorted(out)
        except TypeError:
            return sorted(out, key=repr)

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, t):
        return tuple(t) in self.nodes


def derivative(tree):
    """Remove the maximal nodes: D(T) = {t : t extends to a longer node}."""
    kept = frozenset(t[:-1] for t in tree.nodes if len(t) >= 2)
    return FiniteTree(kept)


def order(tree):
    """Least k with D^k(T) empty; the length of the longest branch."""
    k = 0
    while not tree.is_empty():
        tree = derivative(tree)
        k += 1
    return k


def family_as_tree(fam, universe_max):
    """Members of the family within {1..universe_max}, each viewed as its
    increasing enumeration; the empty set maps to the (uncounted) root."""
    seqs = [tuple(sorted(F)) for F in fam.enumerate(universe_max) if F]
    return FiniteTree.from_sequences(seqs)


# ---------------------------------------------------------------------------
# Block trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockTree:
    """Tree whose labels are finitely supported blocks, carrying the mode
    of equivalence to certify (l1 or c0) and the constant K >= 1."""

    tree: FiniteTree
    mode: str = "l1"
    K: Fraction = Fraction(1)

    def __post_init__(self):
        if self.mode not in ("l1", "c0"):
            raise TreeError("mode must be 'l1' or 'c0'")
        if self.K < 1:
            raise TreeError("equivalence constant must be >= 1")

    @classmethod
    def from_branches(cls, branches, mode="l1", K=Fraction(1)):
        return cls(FiniteTree.from_sequences(branches), mode, Fraction(K))


@dataclass(frozen=True)
class TreeCertificate:
    mode: str
    K: Fraction
    branch_values: tuple  # ((branch, extremal value), ...)

    @property
    def ok(self):
        return True

    def to_json(self):
        return {
            "ok": True,
            "mode": self.mode,
            "K": str(self.K),
            "branches": [
                {"labels": [x.to_json() for x in br],
                 "extremal": str(v) if isinstance(v, Fraction) else v}
                for br, v in self.branch_values
            ],
        }


@dataclass(frozen=True)
class TreeViolation:
    reason: str
    branch: tuple
    coefficients: tuple = ()
    value: object = None

    @property
    def ok(self):
        return False

    def to_json(self):
        return {
            "ok": False,
            "reason": self.reason,
            "branch": [x.to_json() for x in self.branch],
            "coefficients": [str(c) for c in self.coefficients],
            "value": str(self.value) if self.value is not None else None,
        }


def _combine(branch, signs):
    acc = FsVector()
    for x, s in zip(branch, signs):
        acc = acc + (x if s > 0 else x.scale(-1))
    return acc


def certify_block_tree(block_tree, space, float_tol=1e-9):
    """Verify a block tree's invariants by exact norm evaluation.

    Each label must be normalized and supports must strictly increase
    along branches.  On each maximal branch of length k the extremal
    equivalence check runs over the 2^k sign patterns: for l1 mode the
    minimum of ||sum eps_i x_i|| over patterns must be >= k/K (the
    minimum of the norm on the l1-sphere is attained at such vertices);
    for c0 mode the maximum must be <= K (the lower c0 estimate
    ||sum a_i x_i|| >= max|a_i| is automatic for a bimonotone basis).
    """
    tree, mode, K = block_tree.tree, block_tree.mode, block_tree.K
    tol = float_tol if space_mode(space) == "float" else 0
    for t in sorted(tree.nodes, key=lambda u: (len(u), repr(u))):
        x = t[-1]
        if x.is_zero():
            return TreeViolation("zero label", t)
        nx = norm(space, x)
        if abs(nx - 1) > tol:
            return TreeViolation("label not normalized", t, value=nx)
        if len(t) >= 2 and t[-2].max_support() >= x.min_support():
            return TreeViolation("supports not strictly increasing", t)
    branch_values = []
    for br in tree.branches():
        k = len(br)
        if k > PATTERN_BOUND:
            # all built-in norms are 1-unconditional and branch labels
            # have disjoint supports, so every sign pattern gives the
            # same norm; one evaluation is exact
            patterns = [(1,) * k]
        else:
            patterns = itertools.product((1, -1), repeat=k)
        if mode == "l1":
            worst = None
            for signs in patterns:
                v = norm(space, _combine(br, signs))
                if worst is None or v < worst:
                    worst, worst_signs = v, signs
            if K * worst < k - tol * k:
                return TreeViolation("l1 lower estimate fails", br,
                                     coefficients=worst_signs, value=worst)
            branch_values.append((br, worst))
        else:
            worst = None
            for signs in patterns:
                v = norm(space, _combine(br, signs))
                if worst is None or v > worst:
                    worst, worst_signs = v, signs
            if worst > K + tol:
                return TreeViolation("c0 upper estimate fails", br,
                                     coefficients=worst_signs, value=worst)
            branch_values.append((br, worst))
    return TreeCertificate(mode, K, tuple(branch_values))


def tree_to_family(block_tree, universe_max, close_subsequences=False):
    """Family of all (m_1 < ... < m_l) with m_i >= max supp x_i for some
    branch (x_1, ..., x_l), within {1..universe_max}; hereditary and
    spreading closure are applied."""
    caps = set()
    for t in block_tree.tree.nodes:
        caps.add(tuple(x.max_support() for x in t))
    if close_subsequences:
        extra = set()
        for c in caps:
            for r in range(1, len(c) + 1):
                extra.update(itertools.combinations(c, r))
        caps |= extra
    sets = set()

    def grow(cap, prefix, lo):
        i = len(prefix)
        if i == len(cap):
            sets.add(tuple(prefix))
            return
        for m in range(max(cap[i], lo), universe_max + 1):
            prefix.append(m)
            grow(cap, prefix, m + 1)
            prefix.pop()

    for cap in sorted(caps):
        grow(cap, [], 1)
    return explicit_family(sets, close=True, universe_max=universe_max)


# ---------------------------------------------------------------------------
# Index lower bound search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchFailure:
    stats: dict = field(default_factory=dict)

    @property
    def ok(self):
        return False


def _basis_branch(member, space):
    return tuple(FsVector.basis(m) for m in member)


def _average_branch(member, space):
    """Normalized averages over maximal S_1 sets, one per member element,
    placed at successive disjoint supports determined by the prefix."""
    out = []
    start = member[0]
    for _ in member:
        x = FsVector.average(range(start, 2 * start))
        n = norm(space, x)
        out.append(x.scale(Fraction(1) / n) if n != 1 else x)
        start = 2 * start
    return tuple(out)


def index_lower_bound_search(space, fam, K, universe_max, mode="l1",
                             candidates=None):
    """Try to build a K-certified block tree with one branch per maximal
    member of the family's truncation.

    Candidate strategies, in order: basis vectors at the member elements,
    normalized averages over maximal min-bounded sets, then any
    caller-supplied strategies (member -> branch).  Returns the first
    (BlockTree, TreeCertificate) pair that certifies, else a
    SearchFailure with statistics; failure is not a proof of absence.
    """
    K = Fraction(K) if not isinstance(K, float) else K
    members = [tuple(sorted(F)) for F in fam.enumerate(universe_max)]
    maximal = [F for F in members
               if not any(set(F) < set(G) for G in members)]
    maximal = [F for F in maximal if F]
    if not maximal:
        bt = BlockTree(FiniteTree(), mode, K)
        return bt, TreeCertificate(mode, K, ())
    strategies = [("basis", _basis_branch), ("averages", _average_branch)]
    if candidates:
        strategies += [("user%d" % i, c) for i, c in enumerate(candidates)]
    tried = []
    for name, strat in strategies:
        try:
            branches = [strat(F, space) for F in sorted(maximal)]
        except Exception as exc:  # a strategy may not apply to this space
            tried.append({"strategy": name, "error": str(exc)})
            continue
        bt = BlockTree.from_branches(branches, mode, K)
        res = certify_block_tree(bt, space)
        if res.ok:
            return bt, res
        tried.append({"strategy": name, "violation": res.reason})
    return SearchFailure({"strategies": tried, "branches": len(maximal),
                          "universe_max": universe_max})
