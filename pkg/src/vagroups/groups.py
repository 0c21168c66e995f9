"""Finitely generated virtually abelian groups as explicit finite extensions.

A group is stored as the extension data of

    1 -> Z^r x F -> G -> D -> 1

with F a finite abelian torsion summand, D a finite point group acting
diagonally on the lattice (an integer matrix per label on the free part, an
automorphism of F on the torsion part), and a derived 2-cocycle
c : D x D -> Z^r x F encoding non-split extensions.  Elements are pairs
(lattice vector, point label) with twisted multiplication.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm, prod
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import GroupBuildError
from .exactlinear import IntMatrix, smith_normal_form, solve_diophantine


# ---------------------------------------------------------------------------
# finite abelian torsion summand


@dataclass(frozen=True)
class FiniteAbelian:
    """Finite abelian group in invariant-factor form, factors m1 | m2 | ...

    Elements are tuples of residues, one per factor.
    """

    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(m) for m in self.factors))
        for m in self.factors:
            if m < 2:
                raise ValueError("invariant factors must be >= 2")
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise ValueError("invariant factors must form a divisibility chain")

    @classmethod
    def trivial(cls) -> "FiniteAbelian":
        return cls(())

    @property
    def is_trivial(self) -> bool:
        return not self.factors

    @property
    def ngens(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return prod(self.factors)

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.factors)

    def reduce(self, raw: Sequence[int]) -> tuple[int, ...]:
        if len(raw) != len(self.factors):
            raise ValueError("torsion vector has wrong length")
        return tuple(int(x) % m for x, m in zip(raw, self.factors))

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.factors))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((-x) % m for x, m in zip(a, self.factors))

    def scale(self, k: int, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((k * x) % m for x, m in zip(a, self.factors))

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(m) for m in self.factors))

    def element_order(self, a: Sequence[int]) -> int:
        return lcm(*(m // gcd(x, m) for x, m in zip(a, self.factors))) if self.factors else 1

    def apply_matrix(self, mat: IntMatrix, a: Sequence[int]) -> tuple[int, ...]:
        return self.reduce(mat.apply(a))

    def action_key(self, mat: IntMatrix) -> tuple:
        """Canonical form of the endomorphism f -> mat*f: images of basis vectors."""
        return tuple(self.reduce(mat.column(j)) for j in range(len(self.factors)))

    def is_automorphism_matrix(self, mat: IntMatrix) -> bool:
        if mat.rows != len(self.factors) or mat.cols != len(self.factors):
            return False
        for j, mj in enumerate(self.factors):
            for k, mk in enumerate(self.factors):
                if (mat.data[j][k] * mk) % mj:
                    return False  # not well-defined on residues
        seen = {self.apply_matrix(mat, f) for f in self.elements()}
        return len(seen) == self.order


# ---------------------------------------------------------------------------
# finite point group


def _closure(table: Sequence[Sequence[int]], seed: Iterable[int]) -> frozenset[int]:
    out = {0}
    out.update(seed)
    frontier = list(out)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(out):
                for c in (table[a][b], table[b][a]):
                    if c not in out:
                        out.add(c)
                        nxt.append(c)
        frontier = nxt
    return frozenset(out)


class PointGroup:
    """Finite group on labels 0..n-1 with a full Cayley table; 0 is the identity.

    The table is verified to be a group on construction: identity row/column,
    two-sided inverses, and associativity via Light's test against a
    generating set.
    """

    __slots__ = ("table", "inverse", "generators", "n")

    def __init__(self, table: Sequence[Sequence[int]], generators: Optional[Sequence[int]] = None, validate: bool = True):
        tab = tuple(tuple(int(x) for x in row) for row in table)
        n = len(tab)
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "n", n)
        if any(len(row) != n for row in tab):
            raise ValueError("multiplication table must be square")
        if any(x < 0 or x >= n for row in tab for x in row):
            raise ValueError("table entries out of range")
        if n == 0:
            raise ValueError("empty group")
        if any(tab[0][j] != j or tab[j][0] != j for j in range(n)):
            raise ValueError("label 0 is not a two-sided identity")
        inverse = [None] * n
        for a in range(n):
            for b in range(n):
                if tab[a][b] == 0 and tab[b][a] == 0:
                    inverse[a] = b
                    break
            if inverse[a] is None:
                raise ValueError(f"label {a} has no two-sided inverse")
        object.__setattr__(self, "inverse", tuple(inverse))
        if generators is None:
            generators = self._find_generators()
        gens = tuple(dict.fromkeys(int(g) for g in generators))
        object.__setattr__(self, "generators", gens)
        if validate:
            if _closure(tab, gens) != frozenset(range(n)):
                raise ValueError("given generators do not generate the group")
            # Light's associativity test: enough to check triples through generators
            for g in gens:
                for x in range(n):
                    xg = tab[x][g]
                    rowg = tab[g]
                    for y in range(n):
                        if tab[xg][y] != tab[x][rowg[y]]:
                            raise ValueError("multiplication table is not associative")

    def _find_generators(self) -> tuple[int, ...]:
        gens: list[int] = []
        sub = frozenset({0})
        while len(sub) < self.n:
            g = min(set(range(self.n)) - sub)
            gens.append(g)
            sub = _closure(self.table, gens)
        return tuple(gens)

    @classmethod
    def trivial(cls) -> "PointGroup":
        return cls(((0,),), generators=())

    @classmethod
    def from_elements(cls, elements: Sequence, mul: Callable, identity) -> tuple["PointGroup", list]:
        """Build a table from concrete hashable elements; identity is moved to label 0."""
        elems = list(elements)
        if identity not in elems:
            raise ValueError("identity not among the elements")
        elems.remove(identity)
        elems.insert(0, identity)
        index = {e: i for i, e in enumerate(elems)}
        if len(index) != len(elems):
            raise ValueError("duplicate elements")
        table = [[index[mul(a, b)] for b in elems] for a in elems]
        return cls(table), elems

    @classmethod
    def closure_of(cls, gens: Sequence, mul: Callable, identity, cap: int = 192) -> tuple["PointGroup", list]:
        """Close concrete generators under multiplication (finite groups only)."""
        elems = [identity]
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = mul(a, g)
                    if b not in seen:
                        seen.add(b)
                        elems.append(b)
                        nxt.append(b)
                        if len(elems) > cap:
                            raise GroupBuildError(f"closure exceeds {cap} elements: not finite or too large")
            frontier = nxt
        group, ordered = cls.from_elements(elems, mul, identity)
        gen_labels = tuple(ordered.index(g) for g in gens if g in ordered)
        return cls(group.table, generators=gen_labels or None), ordered

    def __len__(self) -> int:
        return self.n

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def conj(self, a: int, g: int) -> int:
        """g^-1 * a * g"""
        return self.table[self.table[self.inverse[g]][a]][g]

    def order_of(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    @property
    def exponent(self) -> int:
        return lcm(*(self.order_of(a) for a in range(self.n)))

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a] for a in range(self.n) for b in range(self.n))

    def conjugacy_classes(self) -> tuple[tuple[int, ...], ...]:
        seen = set()
        classes = []
        for a in range(self.n):
            if a in seen:
                continue
            cls_ = sorted({self.conj(a, g) for g in range(self.n)})
            seen.update(cls_)
            classes.append(tuple(cls_))
        classes.sort(key=lambda c: c[0])
        return tuple(classes)

    def commutator_subgroup(self) -> frozenset[int]:
        comms = {
            self.table[self.table[a][b]][self.table[self.inverse[a]][self.inverse[b]]]
            for a in range(self.n)
            for b in range(self.n)
        }
        return _closure(self.table, comms)

    def subgroup_closure(self, seed: Iterable[int]) -> frozenset[int]:
        return _closure(self.table, seed)

    def subgroup(self, labels: Iterable[int]) -> tuple["PointGroup", tuple[int, ...]]:
        """Subgroup on the given labels; returns (group, old-label per new label)."""
        old = tuple(sorted(set(labels)))
        if not old or old[0] != 0:
            raise ValueError("subgroup must contain the identity")
        pos = {o: i for i, o in enumerate(old)}
        table = []
        for a in old:
            row = []
            for b in old:
                c = self.table[a][b]
                if c not in pos:
                    raise ValueError("labels are not closed under multiplication")
                row.append(pos[c])
            table.append(row)
        return PointGroup(table, validate=False), old

    def quotient(self, normal: Iterable[int]) -> tuple["PointGroup", tuple[int, ...]]:
        """Quotient by a normal subgroup; returns (group, projection per old label)."""
        nset = frozenset(normal)
        if self.subgroup_closure(nset) != nset:
            raise ValueError("normal set is not a subgroup")
        for h in nset:
            for g in range(self.n):
                if self.conj(h, g) not in nset:
                    raise ValueError("subgroup is not normal")
        coset_of = {}
        reps = []
        for a in range(self.n):
            if a in coset_of:
                continue
            # a is the minimal member of its coset: smaller members would
            # already be assigned (their coset is the same set)
            coset = sorted(self.table[a][h] for h in nset)
            idx = len(reps)
            reps.append(coset[0])
            for x in coset:
                coset_of[x] = idx
        table = [[coset_of[self.table[reps[i]][reps[j]]] for j in range(len(reps))] for i in range(len(reps))]
        return PointGroup(table, validate=False), tuple(coset_of[a] for a in range(self.n))

    @staticmethod
    def direct_product(g1: "PointGroup", g2: "PointGroup") -> tuple["PointGroup", list[tuple[int, int]]]:
        pairs = [(a, b) for a in range(g1.n) for b in range(g2.n)]
        index = {p: i for i, p in enumerate(pairs)}
        table = [
            [index[(g1.mul(a1, b1), g2.mul(a2, b2))] for (b1, b2) in pairs]
            for (a1, a2) in pairs
        ]
        gens = [index[(g, 0)] for g in g1.generators] + [index[(0, g)] for g in g2.generators]
        return PointGroup(table, generators=gens or None), pairs

    # -- structure identification (display only) ---------------------------

    def abelian_invariants(self) -> tuple[int, ...]:
        """Invariant factors of an abelian group, from order-divisor counts.

        For each divisor m of |H| the count #{x : x^m = e} equals the
        product of gcd(m, d_i) over the invariant factors, which pins the
        chain uniquely.
        """
        if not self.is_abelian():
            raise ValueError("not abelian")
        n = self.n
        if n == 1:
            return ()
        orders = [self.order_of(a) for a in range(n)]
        divisors = [m for m in range(1, n + 1) if n % m == 0]
        actual = {m: sum(1 for o in orders if m % o == 0) for m in divisors}

        def chains(total, minimum):
            if total == 1:
                yield ()
                return
            for d in range(max(2, minimum), total + 1):
                if total % d == 0:
                    for rest in chains(total // d, d):
                        if all(x % d == 0 for x in rest):
                            yield (d,) + rest

        for chain in chains(n, 2):
            if all(prod(gcd(m, d) for d in chain) == cnt for m, cnt in actual.items()):
                return chain
        raise RuntimeError("no invariant-factor chain matched")  # unreachable for valid tables

    def structure_name(self) -> str:
        n = self.n
        if n == 1:
            return "{e}"
        if self.is_abelian():
            return "x".join(f"Z{d}" for d in self.abelian_invariants())
        involutions = sum(1 for a in range(1, n) if self.order_of(a) == 2)
        if n == 6:
            return "S3"
        if n == 8:
            return "D4" if involutions == 5 else "Q8"
        if n == 12:
            if involutions == 7:
                return "D6"
            if involutions == 3:
                return "A4"
            if involutions == 1:
                return "Dic3"
        if n == 10 and involutions == 5:
            return "D5"
        return f"nonabelian(order {n})"


# ---------------------------------------------------------------------------
# the extension


@dataclass(frozen=True)
class GroupElement:
    """Element (v, d) of the extension: lattice vector plus point label."""

    group: "VAGroup" = field(repr=False)
    free: tuple[int, ...]
    tor: tuple[int, ...]
    d: int

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupElement)
            and self.group is other.group
            and self.free == other.free
            and self.tor == other.tor
            and self.d == other.d
        )

    def __hash__(self) -> int:
        return hash((id(self.group), self.free, self.tor, self.d))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if self.group is not other.group:
            raise ValueError("elements of different groups")
        g = self.group
        cf, ct = g.cocycle(self.d, other.d)
        act_f, act_t = g.act_vec(self.d, other.free, other.tor)
        free = tuple(a + b + c for a, b, c in zip(self.free, act_f, cf))
        tor = g.torsion.add(g.torsion.add(self.tor, act_t), ct)
        return GroupElement(g, free, tor, g.point.mul(self.d, other.d))

    def inverse(self) -> "GroupElement":
        g = self.group
        dinv = g.point.inv(self.d)
        cf, ct = g.cocycle(dinv, self.d)
        act_f, act_t = g.act_vec(dinv, self.free, self.tor)
        free = tuple(-a - c for a, c in zip(act_f, cf))
        tor = g.torsion.neg(g.torsion.add(act_t, ct))
        return GroupElement(g, free, tor, dinv)

    def __pow__(self, k: int) -> "GroupElement":
        if k < 0:
            return self.inverse() ** (-k)
        out = self.group.identity()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    @property
    def is_identity(self) -> bool:
        return self.d == 0 and self.tor == self.group.torsion.zero() and all(x == 0 for x in self.free)

    def order(self, limit: int = 10_000) -> Optional[int]:
        """Exact order by iteration, or None if it exceeds the limit (infinite)."""
        cur = self
        for k in range(1, limit + 1):
            if cur.is_identity:
                return k
            cur = cur * self
        return None

    def __repr__(self) -> str:
        return f"({self.free}, {self.tor}, d={self.d})"


@dataclass(frozen=True)
class CentralizerData:
    """The centralizer L = C_G(Z^r) and the quotients it defines.

    d0 is the kernel of the free-part action (L is its preimage), d1 the
    quotient point group D/D0, k its order.
    """

    d0_labels: tuple[int, ...]
    d0_group: PointGroup
    d0_old_labels: tuple[int, ...]
    d1_group: PointGroup
    d1_projection: tuple[int, ...]
    coset_reps: tuple[int, ...]

    @property
    def k(self) -> int:
        return self.d1_group.n


@dataclass(frozen=True)
class FGAbelianGroup:
    """Finitely generated abelian group in invariant-factor form."""

    free_rank: int
    factors: tuple[int, ...]

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z{m}" for m in self.factors)
        return " x ".join(parts) if parts else "0"

    @property
    def torsion_order(self) -> int:
        return prod(self.factors) if self.factors else 1


class LAbelianization:
    """Abelianization of L = preimage of D0, with a working coordinate system.

    Generators of the presentation are the lattice basis e_1..e_r, the torsion
    generators of F, and one section generator per element of D0.  Smith
    reduction of the relation matrix yields invariant-factor coordinates;
    ``reduced_coords`` maps any element of L to them, which is all a character
    of L needs to be evaluated exactly.
    """

    def __init__(self, group: "VAGroup", d0_labels: tuple[int, ...]):
        self.group = group
        self.d0_labels = d0_labels
        self._d0_pos = {d: i for i, d in enumerate(d0_labels)}
        r, t = group.rank, group.torsion.ngens
        self.n_gens = r + t + len(d0_labels)
        rows = group._presentation_relations(d0_labels)
        if not rows:
            rows = [[0] * self.n_gens]  # free presentation; a zero row keeps shapes honest
        snf = smith_normal_form(IntMatrix(rows))
        self._snf = snf
        diag = snf.diagonal
        rank = snf.rank
        self.torsion_positions = tuple(i for i in range(rank) if diag[i] > 1)
        self.torsion_factors = tuple(diag[i] for i in self.torsion_positions)
        self.free_positions = tuple(range(rank, self.n_gens))
        self.result = FGAbelianGroup(free_rank=len(self.free_positions), factors=self.torsion_factors)
        self.basis_images = tuple(self.reduced_coords(self._unit_row(i)) for i in range(r))

    def _unit_row(self, i: int) -> tuple[int, ...]:
        return tuple(int(j == i) for j in range(self.n_gens))

    def presentation_row(self, element: GroupElement) -> tuple[int, ...]:
        if element.d not in self._d0_pos:
            raise ValueError("element is not in L (its point label acts nontrivially on Z^r)")
        g = self.group
        r, t = g.rank, g.torsion.ngens
        row = [0] * self.n_gens
        row[:r] = element.free
        row[r : r + t] = element.tor
        row[r + t + self._d0_pos[element.d]] = 1
        return tuple(row)

    def reduced_coords(self, row: Sequence[int]) -> tuple[int, ...]:
        """Invariant-factor coordinates (torsion residues, then free integers)."""
        v = self._snf.V
        z = [sum(row[i] * v.data[i][j] for i in range(self.n_gens)) for j in range(self.n_gens)]
        tor = tuple(z[i] % d for i, d in zip(self.torsion_positions, self.torsion_factors))
        free = tuple(z[i] for i in self.free_positions)
        return tor + free

    def coord_generator_rows(self) -> tuple[tuple[int, ...], ...]:
        """Presentation-generator expression of each kept coordinate (rows of V^-1)."""
        vi = self._snf.v_inv
        kept = self.torsion_positions + self.free_positions
        return tuple(vi.data[i] for i in kept)

    def element_coords(self, element: GroupElement) -> tuple[int, ...]:
        return self.reduced_coords(self.presentation_row(element))


@dataclass(frozen=True)
class TorsionWitness:
    has_torsion: bool
    witness: Optional[GroupElement]
    order: Optional[int]


@dataclass(frozen=True)
class OrderCensus:
    """Which exact finite element orders occur, up to a bound."""

    bound: int
    exists: dict[int, bool]
    has_infinite_order: bool

    def orders_present(self) -> tuple[int, ...]:
        return tuple(k for k in sorted(self.exists) if self.exists[k])


class VAGroup:
    """A finitely generated virtually abelian group as explicit extension data."""

    def __init__(
        self,
        rank: int,
        torsion: FiniteAbelian,
        point: PointGroup,
        phi_free: Sequence[IntMatrix],
        phi_tor: Optional[Sequence[IntMatrix]] = None,
        cocycle_free: Optional[Sequence[Sequence[tuple[int, ...]]]] = None,
        cocycle_tor: Optional[Sequence[Sequence[tuple[int, ...]]]] = None,
        vector_system: Optional[Sequence[tuple[Fraction, ...]]] = None,
        name: str = "",
        validate: bool = True,
    ):
        self.rank = int(rank)
        self.torsion = torsion
        self.point = point
        self.name = name
        n = point.n
        r = self.rank
        t = torsion.ngens
        self.phi_free = tuple(phi_free)
        if phi_tor is None:
            phi_tor = tuple(IntMatrix.identity(t) for _ in range(n))
        self.phi_tor = tuple(phi_tor)
        zero_free = (0,) * r
        zero_tor = torsion.zero()
        if cocycle_free is None:
            cocycle_free = tuple(tuple(zero_free for _ in range(n)) for _ in range(n))
        if cocycle_tor is None:
            cocycle_tor = tuple(tuple(zero_tor for _ in range(n)) for _ in range(n))
        self._coc_free = tuple(tuple(tuple(int(x) for x in c) for c in row) for row in cocycle_free)
        self._coc_tor = tuple(tuple(torsion.reduce(c) for c in row) for row in cocycle_tor)
        self.vector_system = (
            tuple(tuple(Fraction(x) for x in v) for v in vector_system) if vector_system is not None else None
        )
        self._tor_action_keys = tuple(torsion.action_key(a) for a in self.phi_tor)
        self._cache: dict = {}
        if validate:
            self._validate()

    # -- validation ---------------------------------------------------------

    def _validate(self) -> None:
        n, r = self.point.n, self.rank
        if len(self.phi_free) != n or len(self.phi_tor) != n:
            raise ValueError("one action matrix per point label is required")
        if self.phi_free[0] != IntMatrix.identity(r):
            raise ValueError("identity label must act trivially on Z^r")
        for d, m in enumerate(self.phi_free):
            if m.rows != r or m.cols != r:
                raise ValueError("free action matrices must be r x r")
            if not m.is_unimodular():
                raise ValueError(f"free action of label {d} is not in GL_r(Z)")
        for d, a in enumerate(self.phi_tor):
            if not self.torsion.is_trivial and not self.torsion.is_automorphism_matrix(a):
                raise ValueError(f"torsion action of label {d} is not an automorphism of F")
        if self._tor_action_keys[0] != self.torsion.action_key(IntMatrix.identity(self.torsion.ngens)):
            raise ValueError("identity label must act trivially on F")
        mul = self.point.mul
        for a in range(n):
            for b in range(n):
                ab = mul(a, b)
                if self.phi_free[a] * self.phi_free[b] != self.phi_free[ab]:
                    raise ValueError("free action is not a homomorphism")
                if self.torsion.action_key(self.phi_tor[a] * self.phi_tor[b]) != self._tor_action_keys[ab]:
                    raise ValueError("torsion action is not a homomorphism")
        zf, zt = (0,) * r, self.torsion.zero()
        for d in range(n):
            if self._coc_free[0][d] != zf or self._coc_free[d][0] != zf:
                raise ValueError("cocycle is not normalized on the free part")
            if self._coc_tor[0][d] != zt or self._coc_tor[d][0] != zt:
                raise ValueError("cocycle is not normalized on the torsion part")
        for d1 in range(n):
            for d2 in range(n):
                for d3 in range(n):
                    lf = tuple(
                        a + b
                        for a, b in zip(
                            self.phi_free[d1].apply(self._coc_free[d2][d3]),
                            self._coc_free[d1][mul(d2, d3)],
                        )
                    )
                    rf = tuple(a + b for a, b in zip(self._coc_free[d1][d2], self._coc_free[mul(d1, d2)][d3]))
                    if lf != rf:
                        raise ValueError("free cocycle identity fails")
                    lt = self.torsion.add(
                        self.torsion.apply_matrix(self.phi_tor[d1], self._coc_tor[d2][d3]),
                        self._coc_tor[d1][mul(d2, d3)],
                    )
                    rt = self.torsion.add(self._coc_tor[d1][d2], self._coc_tor[mul(d1, d2)][d3])
                    if lt != rt:
                        raise ValueError("torsion cocycle identity fails")
        if self.vector_system is not None:
            ts = self.vector_system
            if len(ts) != n or any(len(v) != r for v in ts):
                raise ValueError("vector system has wrong shape")
            if any(x != 0 for x in ts[0]):
                raise ValueError("vector system must vanish at the identity")
            for d1 in range(n):
                for d2 in range(n):
                    derived = tuple(
                        a + b - c
                        for a, b, c in zip(
                            ts[d1],
                            self.phi_free[d1].apply_frac(ts[d2]),
                            ts[mul(d1, d2)],
                        )
                    )
                    if tuple(derived) != tuple(Fraction(x) for x in self._coc_free[d1][d2]):
                        raise ValueError("vector system does not derive the stored cocycle")

    # -- basic structure ------------------------------------------------------

    def __repr__(self) -> str:
        base = self.name or "VAGroup"
        return f"<{base}: rank {self.rank}, F={list(self.torsion.factors)}, |D|={self.point.n}>"

    def cocycle(self, d1: int, d2: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self._coc_free[d1][d2], self._coc_tor[d1][d2]

    def act_vec(self, d: int, free: Sequence[int], tor: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.phi_free[d].apply(free), self.torsion.apply_matrix(self.phi_tor[d], tor)

    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * self.rank, self.torsion.zero(), 0)

    def element(self, free: Sequence[int] = (), tor: Sequence[int] = (), d: int = 0) -> GroupElement:
        free = tuple(int(x) for x in free) if free else (0,) * self.rank
        if len(free) != self.rank:
            raise ValueError("free part has wrong length")
        tor = self.torsion.reduce(tor) if tor else self.torsion.zero()
        if not 0 <= d < self.point.n:
            raise ValueError("point label out of range")
        return GroupElement(self, free, tor, d)

    def section(self, d: int) -> GroupElement:
        """The chosen lift (0, d) of a point label."""
        return self.element(d=d)

    def lattice_basis(self) -> list[GroupElement]:
        out = [self.element(free=tuple(int(j == i) for j in range(self.rank))) for i in range(self.rank)]
        for k in range(self.torsion.ngens):
            out.append(self.element(tor=tuple(int(j == k) for j in range(self.torsion.ngens))))
        return out

    def generating_set(self) -> list[GroupElement]:
        """Lattice basis plus sections of the point-group generators."""
        return self.lattice_basis() + [self.section(d) for d in self.point.generators if d != 0]

    # -- spec operations ------------------------------------------------------

    @property
    def hirsch_length(self) -> int:
        """The rank r; equals the nuclear dimension of C*(G) by the theorem
        this artifact reports (not recomputed operator-algebraically)."""
        return self.rank

    def centralizer_data(self) -> CentralizerData:
        if "centralizer" not in self._cache:
            ident = IntMatrix.identity(self.rank)
            d0 = tuple(sorted(d for d in range(self.point.n) if self.phi_free[d] == ident))
            d0_group, d0_old = self.point.subgroup(d0)
            d1_group, proj = self.point.quotient(frozenset(d0))
            reps = []
            for q in range(d1_group.n):
                reps.append(min(d for d in range(self.point.n) if proj[d] == q))
            self._cache["centralizer"] = CentralizerData(
                d0_labels=d0,
                d0_group=d0_group,
                d0_old_labels=d0_old,
                d1_group=d1_group,
                d1_projection=proj,
                coset_reps=tuple(reps),
            )
        return self._cache["centralizer"]

    def is_crystallographic(self) -> bool:
        if not self.torsion.is_trivial:
            return False
        return len({m.data for m in self.phi_free}) == self.point.n

    def _presentation_relations(self, d_labels: tuple[int, ...]) -> list[list[int]]:
        r, t = self.rank, self.torsion.ngens
        pos = {d: i for i, d in enumerate(d_labels)}
        width = r + t + len(d_labels)
        rows: list[list[int]] = []
        ident_r = IntMatrix.identity(r)
        ident_t = IntMatrix.identity(t)
        for d in d_labels:
            mf = self.phi_free[d] - ident_r
            for i in range(r):
                col = mf.column(i)
                if any(col):
                    row = [0] * width
                    row[:r] = col
                    rows.append(row)
            mt = self.phi_tor[d] - ident_t
            for k in range(t):
                col = mt.column(k)
                if any(col):
                    row = [0] * width
                    row[r : r + t] = col
                    rows.append(row)
        for k, m in enumerate(self.torsion.factors):
            row = [0] * width
            row[r + k] = m
            rows.append(row)
        for d1 in d_labels:
            for d2 in d_labels:
                cf, ct = self.cocycle(d1, d2)
                row = [0] * width
                row[:r] = [-x for x in cf]
                row[r : r + t] = [-x for x in ct]
                row[r + t + pos[d1]] += 1
                row[r + t + pos[d2]] += 1
                row[r + t + pos[self.point.mul(d1, d2)]] -= 1
                if any(row):
                    rows.append(row)
        return rows

    def abelianization(self) -> FGAbelianGroup:
        """H1(G) in invariant-factor form, from the abelianized presentation."""
        if "abelianization" not in self._cache:
            labels = tuple(range(self.point.n))
            width = self.rank + self.torsion.ngens + len(labels)
            rows = self._presentation_relations(labels) or [[0] * width]
            snf = smith_normal_form(IntMatrix(rows))
            self._cache["abelianization"] = FGAbelianGroup(
                free_rank=width - snf.rank, factors=snf.invariant_factors
            )
        return self._cache["abelianization"]

    def l_abelianization(self) -> LAbelianization:
        if "l_ab" not in self._cache:
            self._cache["l_ab"] = LAbelianization(self, self.centralizer_data().d0_labels)
        return self._cache["l_ab"]

    def _finite_order_translation(self, d: int) -> Optional[tuple[int, ...]]:
        """Free part v making (v, d) finite order, or None.

        (v,d)^n lands in the lattice with free part N_d v + s_d, where
        N_d = sum of phi(d^k) and s_d accumulates the cocycle along the
        powers; finite order means that free part vanishes.
        """
        n = self.point.order_of(d)
        power = 0  # label of d^k
        s = [0] * self.rank
        nmat = None
        for k in range(n):
            mk = self.phi_free[power]
            nmat = mk if nmat is None else nmat + mk
            if k >= 1:
                cf, _ = self.cocycle(power, d)
                s = [a + b for a, b in zip(s, cf)]
            power = self.point.mul(power, d)
        sol = solve_diophantine(nmat, tuple(-x for x in s))
        return None if sol is None else sol[0]

    def _power_torsion_part(self, d: int, v_tor: Sequence[int]) -> tuple[int, ...]:
        """Torsion part of (v, d)^n for n = ord(d), as a function of v's torsion part."""
        n = self.point.order_of(d)
        out = self.torsion.zero()
        power = 0
        for k in range(n):
            out = self.torsion.add(out, self.torsion.apply_matrix(self.phi_tor[power], v_tor))
            if k >= 1:
                _, ct = self.cocycle(power, d)
                out = self.torsion.add(out, ct)
            power = self.point.mul(power, d)
        return out

    def has_torsion(self) -> TorsionWitness:
        if "torsion" not in self._cache:
            self._cache["torsion"] = self._torsion_witness(range(1, self.point.n), include_lattice=True)
        return self._cache["torsion"]

    def _torsion_witness(self, d_labels: Iterable[int], include_lattice: bool) -> TorsionWitness:
        if include_lattice and not self.torsion.is_trivial:
            f = next(f for f in self.torsion.elements() if any(f))
            w = self.element(tor=f)
            return TorsionWitness(True, w, self.torsion.element_order(f))
        for d in d_labels:
            if d == 0:
                continue
            v = self._finite_order_translation(d)
            if v is not None:
                w = self.element(free=v, d=d)
                n = self.point.order_of(d)
                order = w.order(limit=n * self.torsion.exponent + 1)
                return TorsionWitness(True, w, order)
        return TorsionWitness(False, None, None)

    def element_order_census(self, bound: int) -> OrderCensus:
        """Which exact finite orders <= bound occur, decided per point-label type."""
        if bound < 2:
            raise ValueError("bound must be >= 2")
        finite = {1}
        for f in self.torsion.elements():
            finite.add(self.torsion.element_order(f))
        for d in range(1, self.point.n):
            if self._finite_order_translation(d) is None:
                continue
            n = self.point.order_of(d)
            for v_tor in self.torsion.elements():
                w = self._power_torsion_part(d, v_tor)
                finite.add(n * self.torsion.element_order(w))
        return OrderCensus(
            bound=bound,
            exists={k: k in finite for k in range(1, bound + 1)},
            has_infinite_order=self.rank >= 1,
        )

    def fc_center_is_torsion_free(self) -> bool:
        """Whether L (= FC(G) in this model) has no nontrivial finite-order element."""
        if not self.torsion.is_trivial:
            return False
        d0 = self.centralizer_data().d0_labels
        return not self._torsion_witness(d0, include_lattice=True).has_torsion


# ---------------------------------------------------------------------------
# affine-generator input


@dataclass(frozen=True)
class AffineGenerator:
    """Seitz-style generator: point part (matrix, torsion automorphism) plus
    a rational translation.  Torsion offsets lie inside the lattice and are
    absorbed; they are accepted for completeness of the input format."""

    matrix: IntMatrix
    translation: tuple[Fraction, ...] = ()
    torsion_map: Optional[IntMatrix] = None
    torsion_translation: tuple[int, ...] = ()


def build_from_affine_generators(
    rank: int,
    torsion,
    generators: Sequence[AffineGenerator],
    max_point_order: int = 192,
    name: str = "",
    validate: bool = True,
) -> VAGroup:
    """Close affine generators into a finite extension of Z^r x F.

    The point parts (matrix, torsion automorphism) are closed under
    multiplication; the translation parts, tracked exactly mod 1, give the
    vector system t : D -> Q^r and the cocycle
    c(d1, d2) = t(d1) + phi(d1) t(d2) - t(d1 d2), which lands in Z^r.
    Re-encountering a point part with a different reduced translation means
    the generators enlarge the lattice and the input is rejected.
    """
    if not isinstance(torsion, FiniteAbelian):
        torsion = FiniteAbelian(tuple(torsion))
    r, t = int(rank), torsion.ngens
    ident_r, ident_t = IntMatrix.identity(r), IntMatrix.identity(t)

    gens = []
    for i, g in enumerate(generators):
        m = g.matrix if isinstance(g.matrix, IntMatrix) else IntMatrix(g.matrix)
        if m.rows != r or m.cols != r:
            raise GroupBuildError(f"generator {i}: matrix must be {r}x{r}")
        if not m.is_unimodular():
            raise GroupBuildError(f"generator {i}: matrix part not invertible over Z")
        a = g.torsion_map if g.torsion_map is not None else ident_t
        if not isinstance(a, IntMatrix):
            a = IntMatrix(a)
        if not torsion.is_trivial and not torsion.is_automorphism_matrix(a):
            raise GroupBuildError(f"generator {i}: torsion map is not an automorphism of F")
        tr = tuple(Fraction(x) for x in (g.translation or (0,) * r))
        if len(tr) != r:
            raise GroupBuildError(f"generator {i}: translation must have length {r}")
        if g.torsion_translation and len(torsion.reduce(g.torsion_translation)) != t:
            raise GroupBuildError(f"generator {i}: torsion translation must have length {t}")
        gens.append((m, a, tuple(x % 1 for x in tr)))

    def key_of(m: IntMatrix, a: IntMatrix) -> tuple:
        return (m.data, torsion.action_key(a))

    ident_key = key_of(ident_r, ident_t)
    reps: dict[tuple, tuple[IntMatrix, IntMatrix, tuple[Fraction, ...]]] = {
        ident_key: (ident_r, ident_t, (Fraction(0),) * r)
    }
    order: list[tuple] = [ident_key]
    frontier = [ident_key]
    while frontier:
        nxt = []
        for cur in frontier:
            m1, a1, t1 = reps[cur]
            for m2, a2, t2 in gens:
                mk, ak = m1 * m2, a1 * a2
                tk = tuple((x + y) % 1 for x, y in zip(t1, m1.apply_frac(t2)))
                k = key_of(mk, ak)
                if k in reps:
                    if reps[k][2] != tk:
                        raise GroupBuildError(
                            "inconsistent generators: the same point part occurs with translations "
                            "that differ by a non-lattice vector (the generated lattice is finer than Z^r)"
                        )
                    continue
                if len(reps) >= max_point_order:
                    raise GroupBuildError(
                        f"point-group closure exceeds {max_point_order}: not finite or too large"
                    )
                reps[k] = (mk, ak, tk)
                order.append(k)
                nxt.append(k)
        frontier = nxt

    n = len(order)
    index = {k: i for i, k in enumerate(order)}
    table = [[0] * n for _ in range(n)]
    for i, ki in enumerate(order):
        m1, a1, t1 = reps[ki]
        for j, kj in enumerate(order):
            m2, a2, t2 = reps[kj]
            k = key_of(m1 * m2, a1 * a2)
            if k not in index:
                raise GroupBuildError("point parts are not closed (internal closure error)")
            tk = tuple((x + y) % 1 for x, y in zip(t1, m1.apply_frac(t2)))
            if reps[k][2] != tk:
                raise GroupBuildError(
                    "inconsistent generators: the vector system is not well defined mod Z^r"
                )
            table[i][j] = index[k]

    gen_labels = tuple(dict.fromkeys(index[key_of(m, a)] for m, a, _ in gens))
    point = PointGroup(table, generators=gen_labels or None)

    phi_free = tuple(reps[k][0] for k in order)
    phi_tor = tuple(reps[k][1] for k in order)
    tsys = tuple(reps[k][2] for k in order)
    coc_free = []
    for i in range(n):
        row = []
        for j in range(n):
            derived = tuple(
                a + b - c
                for a, b, c in zip(tsys[i], phi_free[i].apply_frac(tsys[j]), tsys[table[i][j]])
            )
            if any(x.denominator != 1 for x in derived):
                raise GroupBuildError("inconsistent generators: derived cocycle not integral")
            row.append(tuple(int(x) for x in derived))
        coc_free.append(tuple(row))

    return VAGroup(
        rank=r,
        torsion=torsion,
        point=point,
        phi_free=phi_free,
        phi_tor=phi_tor,
        cocycle_free=tuple(coc_free),
        cocycle_tor=None,
        vector_system=tsys,
        name=name,
        validate=validate,
    )


def semidirect_product(
    rank: int,
    torsion,
    point: PointGroup,
    phi_free: Sequence[IntMatrix],
    phi_tor: Optional[Sequence[IntMatrix]] = None,
    name: str = "",
) -> VAGroup:
    """Split extension: zero cocycle, zero vector system."""
    if not isinstance(torsion, FiniteAbelian):
        torsion = FiniteAbelian(tuple(torsion))
    return VAGroup(
        rank=rank,
        torsion=torsion,
        point=point,
        phi_free=phi_free,
        phi_tor=phi_tor,
        vector_system=tuple((Fraction(0),) * rank for _ in range(point.n)),
        name=name,
    )
