"""Induced monomial representations and exact Mackey-parameter accounting.

Inducing a character of a finite-index subgroup along a fixed coset
transversal gives a monomial representation: each generator maps to a
permutation with one root-of-unity phase per column, both exact.  The rest of
the module decides equivalence by orbits, verifies irreducibility by an
independent finite-image character sum in exact cyclotomic arithmetic, and
computes fiber dimensions with an exact class-algebra method.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt, lcm
from typing import Iterable, Optional, Sequence, Union

from .duals import (
    CrystalLikeResult,
    DualChar,
    LChar,
    OrbitData,
    character_grid,
    free_part_stabilizer,
    in_n_k,
    is_crystal_like,
    lchar_orbit,
    orbit_stabilizer,
)
from .errors import BudgetExceededError, CertificateRequiredError, InconclusiveError
from .groups import GroupElement, PointGroup, VAGroup

MonomialImage = tuple[tuple[int, ...], tuple[Fraction, ...]]


class MonomialRep:
    """Monomial representation induced from a character up a finite-index subgroup.

    ``kind`` is "centralizer" (induction from L along a transversal of D1,
    dimension K) or "lattice" (induction from Z^r x F along a transversal of
    D, dimension |D|).  ``evaluate`` returns (perm, phases) with
    pi(g) e_j = exp(2 pi i phases[j]) e_perm[j].
    """

    def __init__(self, group: VAGroup, kind: str, char: Union[LChar, DualChar]):
        self.group = group
        self.kind = kind
        self.char = char
        if kind == "centralizer":
            cd = group.centralizer_data()
            self.transversal = cd.coset_reps
            self._row_of_label = tuple(cd.d1_projection)
        elif kind == "lattice":
            self.transversal = tuple(range(group.point.n))
            self._row_of_label = tuple(range(group.point.n))
        else:
            raise ValueError(f"unknown induction kind {kind!r}")
        self.dimension = len(self.transversal)
        self._sections = [group.section(d) for d in self.transversal]
        self._section_invs = [s.inverse() for s in self._sections]

    def _phase(self, element: GroupElement) -> Fraction:
        if self.kind == "lattice":
            return self.char.value_on_element(element)
        return self.char.value_on(self.group, element)

    def evaluate(self, g: GroupElement) -> MonomialImage:
        perm = []
        phases = []
        for j in range(self.dimension):
            h = g * self._sections[j]
            i = self._row_of_label[h.d]
            perm.append(i)
            phases.append(self._phase(self._section_invs[i] * h))
        return tuple(perm), tuple(phases)

    def generator_images(self) -> list[tuple[str, MonomialImage]]:
        g = self.group
        out = []
        for i in range(g.rank):
            el = g.element(free=tuple(int(j == i) for j in range(g.rank)))
            out.append((f"e{i + 1}", self.evaluate(el)))
        for k in range(g.torsion.ngens):
            el = g.element(tor=tuple(int(j == k) for j in range(g.torsion.ngens)))
            out.append((f"f{k + 1}", self.evaluate(el)))
        for d in g.point.generators:
            if d != 0:
                out.append((f"s{d}", self.evaluate(g.section(d))))
        return out

    def subgroup_generators(self) -> list[GroupElement]:
        """Generators of the inducting subgroup (the lattice, or L)."""
        g = self.group
        gens = g.lattice_basis()
        if self.kind == "centralizer":
            gens += [g.section(d) for d in g.centralizer_data().d0_labels if d != 0]
        return gens

    def diagonal(self, h: GroupElement) -> tuple[Fraction, ...]:
        perm, phases = self.evaluate(h)
        if perm != tuple(range(self.dimension)):
            raise ValueError("element is not in the inducting subgroup (image not diagonal)")
        return phases

    def serialize(self) -> dict:
        return {
            "kind": self.kind,
            "dimension": self.dimension,
            "transversal": list(self.transversal),
            "generators": [
                {
                    "name": name,
                    "permutation": list(perm),
                    "phases": [f"{p.numerator}/{p.denominator}" for p in phases],
                }
                for name, (perm, phases) in self.generator_images()
            ],
        }


def compose_images(a: MonomialImage, b: MonomialImage) -> MonomialImage:
    pa, fa = a
    pb, fb = b
    return tuple(pa[j] for j in pb), tuple((fb[j] + fa[pb[j]]) % 1 for j in range(len(pb)))


def induce(group: VAGroup, chi: LChar) -> MonomialRep:
    """ind_L^G of a character of L with maximal restricted orbit (dimension K)."""
    if not in_n_k(group, chi):
        raise ValueError(
            "character is rejected: its restriction to Z^r has a nontrivial stabilizer in D1, "
            "so the induction would not be irreducible by this route"
        )
    return MonomialRep(group, "centralizer", chi)


def induce_from_lattice(group: VAGroup, chi: DualChar) -> MonomialRep:
    """Induction of a principal lattice character (dimension [G:A] = |D|)."""
    orb = orbit_stabilizer(group, chi)
    if orb.stabilizer != (0,):
        raise ValueError("lattice induction requires a principal character (trivial stabilizer)")
    return MonomialRep(group, "lattice", chi)


def equivalent(group: VAGroup, chi1: LChar, chi2: LChar) -> bool:
    """Whether two maximal-orbit characters of L induce equivalent representations.

    Decided exactly by D1-orbit equality; the diagonal-multiset criterion is
    kept as an independent oracle (``restriction_diagonal_profile``)."""
    for chi in (chi1, chi2):
        if not in_n_k(group, chi):
            raise ValueError("equivalence is decided only for characters with maximal restricted orbit")
    return any(chi2.angles == c.angles for c in lchar_orbit(group, chi1))


def restriction_diagonal_profile(rep: MonomialRep) -> Counter:
    """Multiset of per-index diagonal columns over generators of the subgroup.

    Two inductions are unitarily equivalent iff these multisets agree: a
    single permutation must align the diagonals of every subgroup element at
    once, and indices can only map to indices carrying the same column.
    """
    gens = rep.subgroup_generators()
    diags = [rep.diagonal(h) for h in gens]
    return Counter(tuple(d[i] for d in diags) for i in range(rep.dimension))


# ---------------------------------------------------------------------------
# exact cyclotomic arithmetic for the irreducibility oracle


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Integer coefficients of the m-th cyclotomic polynomial (low degree first)."""
    poly = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly = _polydiv_exact(poly, cyclotomic_poly(d))
    return tuple(poly)


def _polydiv_exact(num: Sequence[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    dn = len(den) - 1
    assert den[-1] == 1, "divisor must be monic"
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        q = num[i]
        out[i - dn] = q
        if q:
            for k in range(dn + 1):
                num[i - dn + k] -= q * den[k]
    assert all(x == 0 for x in num), "non-exact polynomial division"
    return out


def _polymod(num: Sequence[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    dn = len(den) - 1
    for i in range(len(num) - 1, dn - 1, -1):
        q = num[i]
        if q:
            for k in range(dn + 1):
                num[i - dn + k] -= q * den[k]
    return num[:dn]


def cyclotomic_sum_is_zero(coeffs: dict[Fraction, int]) -> bool:
    """Whether sum c_q * exp(2 pi i q) vanishes exactly."""
    items = [(q % 1, c) for q, c in coeffs.items() if c]
    if not items:
        return True
    m = 1
    for q, _ in items:
        m = lcm(m, q.denominator)
    poly = [0] * m
    for q, c in items:
        poly[(q.numerator * (m // q.denominator)) % m] += c
    if m == 1:
        return poly[0] == 0
    return all(x == 0 for x in _polymod(poly, list(cyclotomic_poly(m))))


def image_group(images: Iterable[MonomialImage], dimension: int, cap: int = 1_000_000) -> list[MonomialImage]:
    """Close generator images under multiplication (the finite image of G)."""
    gens = [(tuple(p), tuple(f % 1 for f in fs)) for p, fs in images]
    ident = (tuple(range(dimension)), (Fraction(0),) * dimension)
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = compose_images(a, g)
                if b not in seen:
                    if len(seen) >= cap:
                        raise InconclusiveError(
                            f"image group exceeds the cap of {cap} elements; irreducibility undecided"
                        )
                    seen.add(b)
                    order.append(b)
                    nxt.append(b)
        frontier = nxt
    return order


def irreducibility_check(rep, cap: int = 1_000_000) -> bool:
    """Independent irreducibility oracle: averaged |trace|^2 equals exactly 1.

    Enumerates the finite image group and evaluates the character norm in
    exact root-of-unity arithmetic (a vanishing cyclotomic sum), so the answer
    is a proof, not an approximation.  Raises InconclusiveError if the image
    exceeds the cap.
    """
    if isinstance(rep, MonomialRep):
        dimension = rep.dimension
        images = [img for _, img in rep.generator_images()]
    else:
        images = list(rep)
        dimension = len(images[0][0])
    group = image_group(images, dimension, cap)
    coeffs: dict[Fraction, int] = {}
    for perm, phases in group:
        fixed = [i for i in range(dimension) if perm[i] == i]
        for i in fixed:
            for j in fixed:
                q = (phases[i] - phases[j]) % 1
                coeffs[q] = coeffs.get(q, 0) + 1
    coeffs[Fraction(0)] = coeffs.get(Fraction(0), 0) - len(group)
    return cyclotomic_sum_is_zero(coeffs)


# ---------------------------------------------------------------------------
# exact character degrees of a finite group (class-algebra method)


def _inv_mod(a: int, p: int) -> int:
    return pow(a % p, p - 2, p)


def _rref_mod(rows: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    rows = [row[:] for row in rows]
    pivots = []
    rank = 0
    cols = len(rows[0]) if rows else 0
    for col in range(cols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = _inv_mod(rows[rank][col], p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                f = rows[i][col] % p
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        pivots.append(col)
        rank += 1
    return rows[:rank], pivots


def _coords_in_rref(basis: list[list[int]], pivots: list[int], vec: list[int], p: int) -> list[int]:
    coords = [vec[c] % p for c in pivots]
    residual = vec[:]
    for coeff, row in zip(coords, basis):
        residual = [(a - coeff * b) % p for a, b in zip(residual, row)]
    if any(residual):
        raise RuntimeError("vector not in subspace")
    return coords

def _charpoly_mod(mat: list[list[int]], p: int) -> list[int]:
    """det(mat - x I) mod p by interpolation at s+1 points (low degree first)."""
    s = len(mat)
    xs = list(range(s + 1))
    ys = []
    for x in xs:
        m = [[(mat[i][j] - (x if i == j else 0)) % p for j in range(s)] for i in range(s)]
        ys.append(_det_mod(m, p))
    # Lagrange interpolation
    coeffs = [0] * (s + 1)
    for k, (xk, yk) in enumerate(zip(xs, ys)):
        # basis polynomial prod_{j != k} (x - xj) / (xk - xj)
        num = [1]
        denom = 1
        for j, xj in enumerate(xs):
            if j == k:
                continue
            num = _polymul_mod(num, [(-xj) % p, 1], p)
            denom = denom * (xk - xj) % p
        scale = yk * _inv_mod(denom, p) % p
        for i, c in enumerate(num):
            coeffs[i] = (coeffs[i] + scale * c) % p
    return coeffs


def _polymul_mod(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _det_mod(mat: list[list[int]], p: int) -> int:
    m = [row[:] for row in mat]
    n = len(m)
    det = 1
    for col in range(n):
        pivot = next((i for i in range(col, n) if m[i][col] % p), None)
        if pivot is None:
            return 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = (-det) % p
        det = det * m[col][col] % p
        inv = _inv_mod(m[col][col], p)
        for i in range(col + 1, n):
            if m[i][col]:
                f = m[i][col] * inv % p
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[col])]
    return det % p


def _kernel_mod(mat: list[list[int]], p: int) -> list[list[int]]:
    s = len(mat)
    rref, pivots = _rref_mod([row[:] for row in mat], p)
    free_cols = [c for c in range(s) if c not in pivots]
    basis = []
    for fc in free_cols:
        vec = [0] * s
        vec[fc] = 1
        for row, pc in zip(rref, pivots):
            vec[pc] = (-row[fc]) % p
        basis.append(vec)
    return basis


def finite_irr_dims(h: PointGroup) -> tuple[int, ...]:
    """Multiset of irreducible dimensions of a finite group, exactly.

    Class-algebra method: the class-sum matrices act on the center of the
    group algebra over a split prime field F_p (p = 1 mod the exponent,
    p > 2|H|); their simultaneous eigenvectors are the central characters
    and the second orthogonality relation recovers each degree as the unique
    small square root mod p.
    """
    if h.n > 192:
        raise ValueError("finite_irr_dims supports |H| <= 192")
    if h.n == 1:
        return (1,)
    classes = h.conjugacy_classes()
    c = len(classes)
    class_of = [0] * h.n
    for idx, cls_ in enumerate(classes):
        for x in cls_:
            class_of[x] = idx
    reps = [cls_[0] for cls_ in classes]
    inv_class = [class_of[h.inv(reps[j])] for j in range(c)]
    exponent = h.exponent
    p = exponent + 1
    while True:
        if p > 2 * h.n and p > 2 and all(p % q for q in range(2, isqrt(p) + 1)):
            break
        p += exponent

    mats = []
    for i in range(c):
        mat = [[0] * c for _ in range(c)]
        for k in range(c):
            for x in classes[i]:
                j = class_of[h.mul(h.inv(x), reps[k])]
                mat[k][j] += 1
        mats.append(mat)

    spaces: list[tuple[list[list[int]], list[int]]] = [_rref_mod([[int(i == j) for j in range(c)] for i in range(c)], p)]
    for mat in mats[1:]:
        if all(len(basis) == 1 for basis, _ in spaces):
            break
        new_spaces = []
        for basis, pivots in spaces:
            s = len(basis)
            if s == 1:
                new_spaces.append((basis, pivots))
                continue
            images = [[sum(mat[a][b] * vec[b] for b in range(c)) % p for a in range(c)] for vec in basis]
            restr_cols = [_coords_in_rref(basis, pivots, img, p) for img in images]
            # restriction matrix R with R[t][u] = coefficient of basis[t] in image of basis[u]
            restr = [[restr_cols[u][t] for u in range(s)] for t in range(s)]
            poly = _charpoly_mod(restr, p)
            roots = [x for x in range(p) if _poly_eval_mod(poly, x, p) == 0]
            covered = 0
            for lam in roots:
                shifted = [[(restr[i][j] - (lam if i == j else 0)) % p for j in range(s)] for i in range(s)]
                kvecs = _kernel_mod(shifted, p)
                if not kvecs:
                    continue
                # each eigenspace stays one block: the commuting class matrices
                # preserve it, while an arbitrary line inside it they need not
                globs = [
                    [sum(kvec[t] * basis[t][a] for t in range(s)) % p for a in range(c)]
                    for kvec in kvecs
                ]
                sub = _rref_mod(globs, p)
                covered += len(sub[0])
                new_spaces.append(sub)
            assert covered == s, "class-sum matrix did not act semisimply"
        spaces = new_spaces

    assert all(len(basis) == 1 for basis, _ in spaces) and len(spaces) == c, "class algebra did not split"
    degrees = []
    for basis, _ in spaces:
        vec = basis[0]
        nz = next(a for a in range(c) if vec[a])
        omegas = []
        for mat in mats:
            img = sum(mat[nz][b] * vec[b] for b in range(c)) % p
            omegas.append(img * _inv_mod(vec[nz], p) % p)
        total = 0
        for j in range(c):
            total = (total + omegas[j] * omegas[inv_class[j]] * _inv_mod(len(classes[j]), p)) % p
        d2 = h.n * _inv_mod(total, p) % p
        d = isqrt(d2)
        assert d * d == d2 and 1 <= d <= h.n, "degree recovery failed"
        degrees.append(d)
    degrees.sort()
    assert sum(d * d for d in degrees) == h.n, "degree squares do not sum to |H|"
    assert len(degrees) == c
    return tuple(degrees)


def _poly_eval_mod(coeffs: Sequence[int], x: int, p: int) -> int:
    out = 0
    for c in reversed(coeffs):
        out = (out * x + c) % p
    return out


def _merge_split(spaces, p):
    """Kernel vectors of the same eigenvalue may arrive one by one; regroup
    exact duplicates of the spanned lines (they are all one-dimensional or
    will be split further)."""
    seen = {}
    for basis, pivots in spaces:
        key = tuple(tuple(row) for row in basis)
        seen[key] = (basis, pivots)
    return list(seen.values())


# ---------------------------------------------------------------------------
# Mackey fibers and dimension accounting


@dataclass(frozen=True)
class IrrepDescriptor:
    """Mackey parameters of one irreducible: a character orbit and a fiber label."""

    char: DualChar
    orbit_size: int
    stabilizer: tuple[int, ...]
    sigma_dim: int
    sigma_index: int

    @property
    def dimension(self) -> int:
        return self.orbit_size * self.sigma_dim


@dataclass(frozen=True)
class FiberResult:
    """Fiber of the Mackey machine over one character orbit.

    ``supported`` is False when the cocycle does not vanish through the
    character on the stabilizer (a projective fiber); the obstruction values
    are returned instead of a guess.
    """

    char: DualChar
    orbit: OrbitData
    supported: bool
    descriptors: tuple[IrrepDescriptor, ...] = ()
    obstruction: Optional[dict[tuple[int, int], Fraction]] = None


def fiber_irreps(group: VAGroup, chi: DualChar) -> FiberResult:
    """Irreducibles over the orbit of chi, in the split case.

    When every cocycle value on the stabilizer is killed by chi, the fiber is
    {extension tensor irrep of the stabilizer quotient}; the dimensions come
    from finite_irr_dims and satisfy sum dim^2 = [G_chi : A] exactly.
    """
    orb = orbit_stabilizer(group, chi)
    stab = orb.stabilizer
    obstruction = {}
    for s, t in itertools.product(stab, stab):
        cf, ct = group.cocycle(s, t)
        val = chi.value_on(group, cf, ct)
        if val:
            obstruction[(s, t)] = val
    if obstruction:
        return FiberResult(char=chi, orbit=orb, supported=False, obstruction=obstruction)
    sub, _ = group.point.subgroup(stab)
    dims = finite_irr_dims(sub)
    assert sum(d * d for d in dims) == len(stab)
    descriptors = tuple(
        IrrepDescriptor(char=chi, orbit_size=orb.size, stabilizer=stab, sigma_dim=d, sigma_index=i)
        for i, d in enumerate(dims)
    )
    assert all(desc.dimension <= group.point.n for desc in descriptors)
    return FiberResult(char=chi, orbit=orb, supported=True, descriptors=descriptors)


@dataclass(frozen=True)
class MaxDimResult:
    value: int
    certificate: CrystalLikeResult
    witness_rep: MonomialRep


def max_irrep_dimension(group: VAGroup, lattice: str = "model", prime_bound: int = 101) -> MaxDimResult:
    """The maximal irreducible dimension [G:A], with a checked witness.

    Refuses without a crystal-like certificate: the index is only an upper
    bound then.
    """
    cert = is_crystal_like(group, lattice=lattice, prime_bound=prime_bound)
    if cert.status != "yes":
        raise CertificateRequiredError(
            f"no crystal-like certificate (status {cert.status!r}); [G:A] = {cert.index} is only an upper bound"
        )
    if lattice == "model":
        rep = induce_from_lattice(group, cert.witness)
    else:
        rep = induce(group, cert.witness)
    assert rep.dimension == cert.index
    return MaxDimResult(value=cert.index, certificate=cert, witness_rep=rep)


@dataclass(frozen=True)
class DimensionCensus:
    denominator: int
    dims: dict[int, int]  # irreducible dimension -> count of Mackey parameters
    unsupported_orbits: int
    unsupported_examples: tuple[DualChar, ...]

    def total_parameters(self) -> int:
        return sum(self.dims.values())


def dimension_census(group: VAGroup, denominator: int, budget: int = 10_000_000) -> DimensionCensus:
    """Mackey-parameter dimensions over all denominator-N character orbits.

    Orbits with a projective (non-split) fiber are counted separately as
    unsupported, never guessed.
    """
    if denominator < 1:
        raise ValueError("denominator must be >= 1")
    work = denominator**group.rank * group.torsion.order * group.point.n
    if work > budget:
        raise BudgetExceededError(
            f"dimension census needs about {work} action evaluations, over the budget of {budget}"
        )
    dims: dict[int, int] = {}
    unsupported = 0
    examples: list[DualChar] = []
    visited: set[tuple] = set()
    for chi in character_grid(group, denominator):
        key = (chi.theta.coords, chi.tor)
        if key in visited:
            continue
        fiber = fiber_irreps(group, chi)
        for other in fiber.orbit.orbit:
            visited.add((other.theta.coords, other.tor))
        if not fiber.supported:
            unsupported += 1
            if len(examples) < 4:
                examples.append(chi)
            continue
        for desc in fiber.descriptors:
            dims[desc.dimension] = dims.get(desc.dimension, 0) + 1
    return DimensionCensus(
        denominator=denominator,
        dims=dims,
        unsupported_orbits=unsupported,
        unsupported_examples=tuple(examples),
    )


def phi_image_membership(group: VAGroup, desc: IrrepDescriptor) -> bool:
    """Whether a Mackey descriptor lies in the image of [chi] -> ind_L^G chi.

    Membership needs a one-dimensional fiber over an orbit whose stabilizer
    is exactly the image of L, and the free part alone must already have that
    stabilizer (otherwise the inducing extension restricts outside the
    maximal-orbit set).
    """
    d0 = set(group.centralizer_data().d0_labels)
    if desc.sigma_dim != 1:
        return False
    if set(desc.stabilizer) != d0:
        return False
    return set(free_part_stabilizer(group, desc.char.theta)) == d0
