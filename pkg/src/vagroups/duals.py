"""Characters of the lattice and of L, dual actions, orbits, and censuses.

A character of the lattice Z^r x F is a pair (theta, psi): rational angles
mod 1 on the free part and a tuple of residues identifying an element of the
dual of F (psi_t(f) = exp(2 pi i sum t_j f_j / m_j)).  The point group acts
through the inverse-transpose of its lattice action; everything is exact, so
stabilizer equality is decidable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .errors import BudgetExceededError
from .exactlinear import IntMatrix, RatVecMod1, act_mod1, smith_normal_form
from .groups import GroupElement, LAbelianization, VAGroup

PRIMES_TO_101 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101)


@dataclass(frozen=True)
class DualChar:
    """Exact character of the lattice Z^r x F."""

    theta: RatVecMod1
    tor: tuple[int, ...]

    def value_on(self, group: VAGroup, free: Sequence[int], tor: Sequence[int]) -> Fraction:
        val = self.theta.pair(free)
        for t, f, m in zip(self.tor, tor, group.torsion.factors):
            val += Fraction(t * f, m)
        return val % 1

    def value_on_element(self, element: GroupElement) -> Fraction:
        if element.d != 0:
            raise ValueError("lattice character evaluated off the lattice")
        return self.value_on(element.group, element.free, element.tor)

    @property
    def is_trivial(self) -> bool:
        return self.theta.is_zero and all(t == 0 for t in self.tor)

    def serialize(self) -> str:
        free = ",".join(f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator) for c in self.theta.coords)
        if self.tor:
            return free + ";" + ",".join(str(t) for t in self.tor)
        return free


def trivial_char(group: VAGroup) -> DualChar:
    return DualChar(RatVecMod1.zero(group.rank), group.torsion.zero())


def make_char(group: VAGroup, theta: Sequence, tor: Sequence[int] = ()) -> DualChar:
    th = RatVecMod1.of(theta)
    if len(th) != group.rank:
        raise ValueError("free part has wrong length")
    t = group.torsion.reduce(tor) if tor else group.torsion.zero()
    return DualChar(th, t)


def parse_char(group: VAGroup, spec: str) -> DualChar:
    """Parse "a1/b1,a2/b2,...;t1,t2,..." into a character of the lattice."""
    spec = spec.strip()
    free_part, _, tor_part = spec.partition(";")
    try:
        theta = [Fraction(tok.strip()) for tok in free_part.split(",")] if free_part else []
        tor = [int(tok) for tok in tor_part.split(",")] if tor_part else []
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed character spec {spec!r}: {exc}") from None
    if len(theta) != group.rank:
        raise ValueError(f"character spec has {len(theta)} free coordinates, expected {group.rank}")
    if tor and len(tor) != group.torsion.ngens:
        raise ValueError(f"character spec has {len(tor)} torsion coordinates, expected {group.torsion.ngens}")
    return make_char(group, theta, tor)


def _dual_torsion_act(group: VAGroup, d_inv: int, tor: tuple[int, ...]) -> tuple[int, ...]:
    """psi -> psi o phi_tor(d)^-1 in residue coordinates."""
    if not tor:
        return tor
    factors = group.torsion.factors
    angles = tuple(Fraction(t, m) for t, m in zip(tor, factors))
    moved = group.phi_tor[d_inv].transpose().apply_frac(angles)
    out = []
    for q, m in zip(moved, factors):
        v = (q % 1) * m
        if v.denominator != 1:
            raise RuntimeError("torsion dual action left the character lattice")
        out.append(int(v) % m)
    return tuple(out)


def act(group: VAGroup, d: int, chi: DualChar) -> DualChar:
    """The dual action of a point label: conjugation pulled back to characters."""
    d_inv = group.point.inv(d)
    theta = act_mod1(group.phi_free[d_inv].transpose(), chi.theta)
    return DualChar(theta, _dual_torsion_act(group, d_inv, chi.tor))


def act_free(group: VAGroup, d: int, theta: RatVecMod1) -> RatVecMod1:
    return act_mod1(group.phi_free[group.point.inv(d)].transpose(), theta)


@dataclass(frozen=True)
class OrbitData:
    representative: DualChar
    orbit: tuple[DualChar, ...]
    stabilizer: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.orbit)


def orbit_stabilizer(group: VAGroup, chi: DualChar) -> OrbitData:
    seen = {}
    stab = []
    for d in range(group.point.n):
        img = act(group, d, chi)
        key = (img.theta.coords, img.tor)
        if key not in seen:
            seen[key] = img
        if img == chi:
            stab.append(d)
    orbit = tuple(sorted(seen.values(), key=lambda c: (c.theta.coords, c.tor)))
    if len(orbit) * len(stab) != group.point.n:
        raise RuntimeError("orbit-stabilizer count mismatch (action is broken)")
    return OrbitData(representative=chi, orbit=orbit, stabilizer=tuple(stab))


def free_part_stabilizer(group: VAGroup, theta: RatVecMod1) -> tuple[int, ...]:
    return tuple(d for d in range(group.point.n) if act_free(group, d, theta) == theta)


# ---------------------------------------------------------------------------
# principal-character search


@dataclass(frozen=True)
class PrincipalSearch:
    """Outcome of the principal-orbit search over the model lattice.

    status is one of "found", "not_crystal_like", "inconclusive".  A negative
    answer is structural: for every torsion dual psi some nonidentity element
    of its stabilizer acts trivially on the free torus, so it fixes every
    character with that torsion part.  Exhausting the prime sieve without a
    structural obstruction is reported inconclusive, never negative.
    """

    status: str
    char: Optional[DualChar] = None
    orbit: Optional[OrbitData] = None
    prime: Optional[int] = None
    obstructions: Optional[dict[tuple[int, ...], tuple[int, ...]]] = None
    prime_bound: int = 101

    @property
    def found(self) -> bool:
        return self.status == "found"


def _theta_grid(rank: int, p: int) -> Iterator[RatVecMod1]:
    for nums in itertools.product(range(p), repeat=rank):
        yield RatVecMod1(tuple(Fraction(a, p) for a in nums))


def find_principal_character(group: VAGroup, prime_bound: int = 101) -> PrincipalSearch:
    """Search for a lattice character with trivial point-group stabilizer.

    For each psi in the dual of F, elements fixing psi while acting trivially
    on the free part are unavoidable stabilizers; when every psi has one the
    pair is certified not crystal-like.  Otherwise rational free parts with
    prime denominators are sieved in increasing order until a trivial
    stabilizer appears or the bound runs out.
    """
    ident = IntMatrix.identity(group.rank)
    viable = []
    obstructions: dict[tuple[int, ...], tuple[int, ...]] = {}
    for psi in group.torsion.elements():
        s_psi = [d for d in range(group.point.n) if _dual_torsion_act(group, group.point.inv(d), tuple(psi)) == tuple(psi)]
        unavoidable = tuple(d for d in s_psi if d != 0 and group.phi_free[d] == ident)
        if unavoidable:
            obstructions[tuple(psi)] = unavoidable
        else:
            viable.append((tuple(psi), tuple(s_psi)))
    if not viable:
        return PrincipalSearch(status="not_crystal_like", obstructions=obstructions, prime_bound=prime_bound)
    primes = [p for p in PRIMES_TO_101 if p <= prime_bound]
    for p in primes:
        for psi, s_psi in viable:
            for theta in _theta_grid(group.rank, p):
                if any(act_free(group, d, theta) == theta for d in s_psi if d != 0):
                    continue
                chi = DualChar(theta, psi)
                orb = orbit_stabilizer(group, chi)
                if orb.stabilizer == (0,):
                    return PrincipalSearch(status="found", char=chi, orbit=orb, prime=p, prime_bound=prime_bound)
    return PrincipalSearch(status="inconclusive", prime_bound=prime_bound)


@dataclass(frozen=True)
class CrystalLikeResult:
    """Tri-state certificate for a group-lattice pair."""

    status: str  # "yes" | "no" | "inconclusive"
    lattice: str  # "model" (Z^r x F) | "centralizer" (L)
    index: int
    witness: object = None  # DualChar for the model lattice, LChar for L
    orbit_size: Optional[int] = None
    search: Optional[PrincipalSearch] = None


def is_crystal_like(group: VAGroup, lattice: str = "model", prime_bound: int = 101) -> CrystalLikeResult:
    """Decide crystal-likeness of (G, A) for A the model lattice or A = L.

    The centralizer variant requires L abelian (that pair is always
    crystal-like; the search only constructs the witness).
    """
    if lattice == "model":
        index = group.point.n
        search = find_principal_character(group, prime_bound)
        if search.found:
            assert search.orbit is not None and search.orbit.size == index
            return CrystalLikeResult("yes", lattice, index, search.char, search.orbit.size, search)
        if search.status == "not_crystal_like":
            return CrystalLikeResult("no", lattice, index, search=search)
        return CrystalLikeResult("inconclusive", lattice, index, search=search)
    if lattice == "centralizer":
        if not centralizer_is_abelian(group):
            raise ValueError("the centralizer L is nonabelian; (G, L) is not a group-lattice pair this search supports")
        cd = group.centralizer_data()
        index = cd.k
        primes = [p for p in PRIMES_TO_101 if p <= prime_bound]
        for p in primes:
            for theta in _theta_grid(group.rank, p):
                stab = [q for q in range(cd.d1_group.n) if act_free(group, cd.coset_reps[q], theta) == theta]
                if stab == [0]:
                    chi = extend_character(group, theta)
                    return CrystalLikeResult(
                        "yes", lattice, index, chi, index,
                        PrincipalSearch(status="found", prime=p, prime_bound=prime_bound),
                    )
        return CrystalLikeResult("inconclusive", lattice, index, search=PrincipalSearch(status="inconclusive", prime_bound=prime_bound))
    raise ValueError(f"unknown lattice choice {lattice!r} (use 'model' or 'centralizer')")


def centralizer_is_abelian(group: VAGroup) -> bool:
    cd = group.centralizer_data()
    d0 = cd.d0_labels
    sub, old = cd.d0_group, cd.d0_old_labels
    if not sub.is_abelian():
        return False
    ident_t = group.torsion.action_key(IntMatrix.identity(group.torsion.ngens))
    for d in d0:
        if group.torsion.action_key(group.phi_tor[d]) != ident_t:
            return False
    for a in d0:
        for b in d0:
            if group.cocycle(a, b) != group.cocycle(b, a):
                return False
    return True


# ---------------------------------------------------------------------------
# characters of L


@dataclass(frozen=True)
class LChar:
    """Character of L, stored as exact angles on the invariant-factor
    coordinates of L_ab (torsion coordinates first, then free ones)."""

    angles: tuple[Fraction, ...]

    def value_on(self, group: VAGroup, element: GroupElement) -> Fraction:
        lab = group.l_abelianization()
        coords = lab.element_coords(element)
        return sum((a * z for a, z in zip(self.angles, coords)), Fraction(0)) % 1

    def restriction_theta(self, group: VAGroup) -> RatVecMod1:
        """Restriction to Z^r: values on the lattice basis e_1..e_r."""
        lab = group.l_abelianization()
        vals = []
        for img in lab.basis_images:
            vals.append(sum((a * z for a, z in zip(self.angles, img)), Fraction(0)) % 1)
        return RatVecMod1(tuple(vals))


def make_lchar(group: VAGroup, angles: Sequence) -> LChar:
    lab = group.l_abelianization()
    angs = tuple(Fraction(a) % 1 for a in angles)
    if len(angs) != len(lab.torsion_factors) + len(lab.free_positions):
        raise ValueError("wrong number of angle coordinates for L_ab")
    for a, m in zip(angs, lab.torsion_factors):
        if (a * m) % 1 != 0:
            raise ValueError(f"torsion coordinate angle {a} is not killed by its factor {m}")
    return LChar(angs)


def extend_character(group: VAGroup, theta: RatVecMod1) -> LChar:
    """Extend a character of Z^r to a character of L.

    Solved exactly on invariant-factor coordinates: the images of the lattice
    basis give an integer system W beta = theta (mod 1) together with the
    order constraints on torsion coordinates; a Smith reduction produces the
    deterministic solution with free choices at angle zero and torsion
    choices minimal.
    """
    if len(theta) != group.rank:
        raise ValueError("theta must be a character of Z^r")
    lab = group.l_abelianization()
    n_coords = len(lab.torsion_factors) + len(lab.free_positions)
    rows = [list(img) for img in lab.basis_images]
    target = list(theta.coords)
    for i, m in enumerate(lab.torsion_factors):
        row = [0] * n_coords
        row[i] = m
        rows.append(row)
        target.append(Fraction(0))
    snf = smith_normal_form(IntMatrix(rows))
    c = snf.U.apply_frac(target)
    diag = snf.diagonal
    gamma = [Fraction(0)] * n_coords
    for i, q in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d:
            gamma[i] = (q / d) % 1
        elif q % 1 != 0:
            raise RuntimeError("character extension system is unsolvable (cannot happen for L)")
    beta = snf.V.apply_frac(gamma)
    chi = make_lchar(group, beta)
    assert chi.restriction_theta(group) == theta, "extension does not restrict to its input"
    return chi


def lchar_from_dual(group: VAGroup, chi: DualChar) -> LChar:
    """The canonical extension of a full lattice character to L.

    Solves for angles matching chi on the lattice generators (free and
    torsion) before making free choices; requires chi's torsion part to be
    fixed by D0, which holds whenever G_chi contains L.
    """
    lab = group.l_abelianization()
    r, t = group.rank, group.torsion.ngens
    n_coords = len(lab.torsion_factors) + len(lab.free_positions)
    rows = [list(img) for img in lab.basis_images]
    target = list(chi.theta.coords)
    for k in range(t):
        row = [0] * (r + t + len(lab.d0_labels))
        row[r + k] = 1
        rows.append(list(lab.reduced_coords(row)))
        target.append(Fraction(chi.tor[k], group.torsion.factors[k]))
    for i, m in enumerate(lab.torsion_factors):
        row = [0] * n_coords
        row[i] = m
        rows.append(row)
        target.append(Fraction(0))
    snf = smith_normal_form(IntMatrix(rows))
    c = snf.U.apply_frac(target)
    diag = snf.diagonal
    gamma = [Fraction(0)] * n_coords
    for i, q in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d:
            gamma[i] = (q / d) % 1
        elif q % 1 != 0:
            raise ValueError("character does not extend to L with the requested torsion values")
    beta = snf.V.apply_frac(gamma)
    return make_lchar(group, beta)


def in_n_k(group: VAGroup, chi: LChar) -> bool:
    """Whether the restriction to Z^r has stabilizer exactly L (trivial in D1)."""
    theta = chi.restriction_theta(group)
    cd = group.centralizer_data()
    fixes = [q for q in range(cd.d1_group.n) if act_free(group, cd.coset_reps[q], theta) == theta]
    return fixes == [0]


def lchar_act(group: VAGroup, d: int, chi: LChar) -> LChar:
    """Action of a point label on characters of L by conjugation."""
    lab = group.l_abelianization()
    r, t = group.rank, group.torsion.ngens
    section = group.section(d)
    section_inv = section.inverse()
    vals = []
    gens: list[GroupElement] = []
    for i in range(r):
        gens.append(group.element(free=tuple(int(j == i) for j in range(r))))
    for k in range(t):
        gens.append(group.element(tor=tuple(int(j == k) for j in range(t))))
    for d0 in lab.d0_labels:
        gens.append(group.section(d0))
    gen_values = [chi.value_on(group, section_inv * g * section) for g in gens]
    new_angles = []
    for row in lab.coord_generator_rows():
        new_angles.append(sum((z * v for z, v in zip(row, gen_values)), Fraction(0)) % 1)
    return make_lchar(group, new_angles)


def lchar_orbit(group: VAGroup, chi: LChar) -> tuple[LChar, ...]:
    cd = group.centralizer_data()
    out = {}
    for rep in cd.coset_reps:
        img = lchar_act(group, rep, chi)
        out[img.angles] = img
    return tuple(sorted(out.values(), key=lambda c: c.angles))


# ---------------------------------------------------------------------------
# orbit census


@dataclass(frozen=True)
class OrbitCensus:
    denominator: int
    total_characters: int
    sizes: dict[int, int]  # orbit size -> number of orbits

    def max_size(self) -> int:
        return max(self.sizes) if self.sizes else 0


def character_grid(group: VAGroup, denominator: int) -> Iterator[DualChar]:
    for nums in itertools.product(range(denominator), repeat=group.rank):
        theta = RatVecMod1(tuple(Fraction(a, denominator) for a in nums))
        for psi in group.torsion.elements():
            yield DualChar(theta, tuple(psi))


def orbit_census(group: VAGroup, denominator: int, budget: int = 10_000_000) -> OrbitCensus:
    """Partition the denominator-N characters into point-group orbits."""
    if denominator < 1:
        raise ValueError("denominator must be >= 1")
    work = denominator**group.rank * group.torsion.order * group.point.n
    if work > budget:
        raise BudgetExceededError(
            f"orbit census needs about {work} action evaluations, over the budget of {budget}"
        )
    sizes: dict[int, int] = {}
    visited: set[tuple] = set()
    for chi in character_grid(group, denominator):
        key = (chi.theta.coords, chi.tor)
        if key in visited:
            continue
        orb = orbit_stabilizer(group, chi)
        for other in orb.orbit:
            visited.add((other.theta.coords, other.tor))
        sizes[orb.size] = sizes.get(orb.size, 0) + 1
    return OrbitCensus(
        denominator=denominator,
        total_characters=denominator**group.rank * group.torsion.order,
        sizes=sizes,
    )
