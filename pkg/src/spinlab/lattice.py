"""Square-lattice geometry for frustrated Ising / spin-glass models.

The primal lattice is an (M+2) x (M+2) grid of spin sites whose outer ring is
frozen.  The dual lattice is the (M+1) x (M+1) grid of faces, indexed so that
face (x, y) has primal corner sites (x, y), (x+1, y), (x, y+1), (x+1, y+1).
Every dual edge crosses exactly one primal edge; the outermost primal edges
(both endpoints on the frozen ring) border the outer face and have no dual
edge, which is what lets a sign change on the frozen ring act as a frustrated
face on the dual boundary.

Two model families are built on top of this grid:

* ``mixed``: ferromagnetic couplings, frozen ring carrying four alternating
  arcs of +/- spins.  The four arc transitions sit on the outer edges of the
  faces v1..v4, which therefore have odd contour degree for every state.
* ``glass``: all-plus frozen ring, couplings J in {-1, +1} with J = +1 forced
  on ring-ring edges.  Frustration lives on faces with an odd number of
  negative bounding couplings; valid instances have exactly the four faces
  v1..v4 frustrated.

With shift parameter p (0 <= p <= 1/2, 2np integral) and offset c, the four
distinguished dual vertices are

    v1 = (c+2pn, c+2n)   v2 = (c+2n, c+2n-2pn)
    v3 = (c+2n-2pn, c)   v4 = (c, c+2pn)

which are cyclic images of each other under the 90-degree rotation about the
dual center.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import exp, log
from typing import Iterable, Iterator, Mapping

Site = tuple[int, int]
Edge = tuple[Site, Site]
DualVertex = tuple[int, int]
DualEdge = tuple[DualVertex, DualVertex]


class LatticeError(ValueError):
    """Raised for invalid lattice parameters or coupling sets."""


def canon_edge(a, b):
    """Canonical (sorted) form of an undirected edge."""
    return (a, b) if a <= b else (b, a)


def ring_sites_of(dual_side: int) -> Iterator[Site]:
    """Outer-ring sites of the (dual_side+2)^2 primal grid."""
    m = dual_side + 1
    for i in range(m + 1):
        yield (i, 0)
        yield (i, m)
    for j in range(1, m):
        yield (0, j)
        yield (m, j)


@dataclass(frozen=True)
class GibbsParams:
    """Inverse-temperature parameterized by the edge weight lam = e^(2*beta)."""

    lam: float | Fraction

    def __post_init__(self):
        if not self.lam > 1:
            raise LatticeError(f"lam must exceed 1 (got {self.lam})")

    @property
    def beta(self) -> float:
        return 0.5 * log(float(self.lam))

    @property
    def temperature(self) -> float:
        return 2.0 / log(float(self.lam))

    @classmethod
    def from_temperature(cls, t: float) -> "GibbsParams":
        return cls(exp(2.0 / t))


class SpinConfig:
    """A full spin assignment, frozen ring included."""

    __slots__ = ("spins",)

    def __init__(self, spins: Mapping[Site, int]):
        self.spins = dict(spins)

    def __getitem__(self, site: Site) -> int:
        return self.spins[site]

    def __eq__(self, other) -> bool:
        return isinstance(other, SpinConfig) and self.spins == other.spins

    def __hash__(self):
        return hash(frozenset(self.spins.items()))

    def flipped(self, site: Site) -> "SpinConfig":
        out = dict(self.spins)
        out[site] = -out[site]
        return SpinConfig(out)

    def __repr__(self):
        n_minus = sum(1 for s in self.spins.values() if s < 0)
        return f"SpinConfig({len(self.spins)} sites, {n_minus} minus)"


class Lattice:
    """Primal/dual square lattice with a frozen boundary ring.

    Parameters
    ----------
    dual_side : int
        M >= 1; the dual is the (M+1)x(M+1) vertex grid [0, M]^2 and the
        primal holds (M+2)^2 sites [0, M+1]^2.
    ring : mapping Site -> +-1
        Spins of the outer ring (all sites with a coordinate in {0, M+1}).
    mode, n, k, p
        Model bookkeeping; p is stored as a Fraction.  n (with offset
        c = (M-2n)/2) places the distinguished vertices; pass n = None for
        a plain lattice without them.
    """

    def __init__(self, dual_side: int, ring: Mapping[Site, int], *,
                 mode: str = "generic", n: int | None = None,
                 k: int | None = None, p: Fraction | None = None):
        if dual_side < 1:
            raise LatticeError("dual_side must be >= 1 (primal side >= 3)")
        self.M = dual_side
        self.side = dual_side + 2
        self.mode = mode
        self.n = n
        self.k = k
        self.p = Fraction(p) if p is not None else None

        ring_sites = set(self._ring_sites())
        if set(ring) != ring_sites:
            raise LatticeError("ring assignment must cover exactly the outer ring")
        if any(s not in (-1, 1) for s in ring.values()):
            raise LatticeError("ring spins must be +-1")
        self.fixed: dict[Site, int] = dict(ring)
        self.free_sites: list[Site] = [(i, j) for i in range(1, self.M + 1)
                                       for j in range(1, self.M + 1)]

        if n is not None:
            p = self.p if self.p is not None else Fraction(0)
            if not (0 <= p <= Fraction(1, 2)):
                raise LatticeError(f"p must lie in [0, 1/2] (got {p})")
            if (2 * p * n).denominator != 1:
                raise LatticeError(f"2np must be integral (n={n}, p={p})")
            if (self.M - 2 * n) % 2 != 0 or self.M < 2 * n:
                raise LatticeError(
                    f"dual side {self.M} cannot center a side-2n square (n={n})")
            self.offset = (self.M - 2 * n) // 2
            self.two_pn = int(2 * p * n)
            c, a = self.offset, self.two_pn
            self.v1: DualVertex = (c + a, c + 2 * n)
            self.v2: DualVertex = (c + 2 * n, c + 2 * n - a)
            self.v3: DualVertex = (c + 2 * n - a, c)
            self.v4: DualVertex = (c, c + a)
            self.distinguished = (self.v1, self.v2, self.v3, self.v4)
        else:
            self.offset = None
            self.distinguished = None

    # -- site/neighbor structure ------------------------------------------

    def _ring_sites(self) -> Iterator[Site]:
        return ring_sites_of(self.M)

    def sites(self) -> Iterator[Site]:
        for i in range(self.side):
            for j in range(self.side):
                yield (i, j)

    def is_fixed(self, site: Site) -> bool:
        return site in self.fixed

    def neighbors(self, site: Site) -> list[Site]:
        i, j = site
        out = []
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            t = (i + di, j + dj)
            if 0 <= t[0] < self.side and 0 <= t[1] < self.side:
                out.append(t)
        return out

    def edges(self) -> Iterator[Edge]:
        for i in range(self.side):
            for j in range(self.side):
                if i + 1 < self.side:
                    yield ((i, j), (i + 1, j))
                if j + 1 < self.side:
                    yield ((i, j), (i, j + 1))

    # -- duality -----------------------------------------------------------

    def dual_vertices(self) -> Iterator[DualVertex]:
        for x in range(self.M + 1):
            for y in range(self.M + 1):
                yield (x, y)

    def dual_edges(self) -> Iterator[DualEdge]:
        for x in range(self.M + 1):
            for y in range(self.M + 1):
                if x + 1 <= self.M:
                    yield ((x, y), (x + 1, y))
                if y + 1 <= self.M:
                    yield ((x, y), (x, y + 1))

    def dual_neighbors(self, v: DualVertex) -> list[DualVertex]:
        x, y = v
        out = []
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            t = (x + dx, y + dy)
            if 0 <= t[0] <= self.M and 0 <= t[1] <= self.M:
                out.append(t)
        return out

    def primal_of_dual(self, de: DualEdge) -> Edge:
        (x1, y1), (x2, y2) = de
        if y1 == y2:                      # horizontal dual crosses vertical primal
            x = min(x1, x2)
            return canon_edge((x + 1, y1), (x + 1, y1 + 1))
        y = min(y1, y2)                   # vertical dual crosses horizontal primal
        return canon_edge((x1, y + 1), (x1 + 1, y + 1))

    def dual_of_primal(self, e: Edge) -> DualEdge | None:
        """Dual edge crossing primal edge e, or None for outer-ring edges."""
        (i1, j1), (i2, j2) = canon_edge(*e)
        if i1 == i2:                      # vertical primal edge
            if not (1 <= i1 <= self.M):
                return None
            return canon_edge((i1 - 1, j1), (i1, j1))
        if not (1 <= j1 <= self.M):       # horizontal primal edge
            return None
        return canon_edge((i1, j1 - 1), (i1, j1))

    def visible_edges(self) -> Iterator[Edge]:
        """Primal edges that carry a dual edge (everything but the outer ring)."""
        for e in self.edges():
            if self.dual_of_primal(e) is not None:
                yield e

    def face_primal_edges(self, v: DualVertex) -> list[Edge]:
        """The <=4 primal edges bounding face v (ring-ring ones included)."""
        x, y = v
        return [canon_edge((x, y), (x + 1, y)),
                canon_edge((x, y + 1), (x + 1, y + 1)),
                canon_edge((x, y), (x, y + 1)),
                canon_edge((x + 1, y), (x + 1, y + 1))]

    @property
    def dual_center(self) -> tuple[Fraction, Fraction]:
        h = Fraction(self.M, 2)
        return (h, h)

    # -- symmetries (used heavily by tests) --------------------------------

    def rot90_dual(self, v: DualVertex) -> DualVertex:
        """Clockwise quarter turn of the dual grid: v1 -> v2 -> v3 -> v4."""
        x, y = v
        return (y, self.M - x)

    def rot90_site(self, s: Site) -> Site:
        i, j = s
        return (j, self.M + 1 - i)

    def antidiag_dual(self, v: DualVertex) -> DualVertex:
        """Reflection across the v1-v3 diagonal (an involution when p = 0)."""
        x, y = v
        return (self.M - y, self.M - x)

    def antidiag_site(self, s: Site) -> Site:
        i, j = s
        return (self.M + 1 - j, self.M + 1 - i)

    # -- constructors -------------------------------------------------------

    @classmethod
    def generic(cls, dual_side: int, ring_spin: int = 1) -> "Lattice":
        return cls(dual_side, {s: ring_spin for s in ring_sites_of(dual_side)})

    def spin_config(self, free_values: Mapping[Site, int]) -> SpinConfig:
        if set(free_values) != set(self.free_sites):
            raise LatticeError("free_values must cover exactly the free sites")
        spins = dict(self.fixed)
        spins.update(free_values)
        return SpinConfig(spins)

    def uniform_config(self, spin: int = 1) -> SpinConfig:
        return self.spin_config({s: spin for s in self.free_sites})


def make_mixed_boundary(n: int, p) -> "Lattice":
    """Ferromagnet with four +/- boundary arcs meeting at the v1..v4 faces.

    The frozen ring is + on the two arcs running v1->v2 and v3->v4 (clockwise)
    and - on the other two, so each arc transition sits on the single outer
    primal edge of the matching distinguished face.
    """
    p = Fraction(p)
    if n < 1:
        raise LatticeError("n must be >= 1")
    if not (0 <= p <= Fraction(1, 2)):
        raise LatticeError(f"p must lie in [0, 1/2] (got {p})")
    if (2 * p * n).denominator != 1:
        raise LatticeError(f"2np must be integral (n={n}, p={p})")
    m = 2 * n
    a = int(2 * p * n)          # arc shift along each side
    top = m + 1
    ring: dict[Site, int] = {}
    for i in range(top + 1):
        ring[(i, top)] = 1 if i >= a + 1 else -1
        ring[(i, 0)] = 1 if i <= m - a else -1
    for j in range(1, top):
        ring[(top, j)] = 1 if j >= m - a + 1 else -1
        ring[(0, j)] = 1 if j <= a else -1
    return Lattice(m, ring, mode="mixed", n=n, p=p)


class CouplingSet:
    """Edge couplings J in {-1, +1}; unspecified edges default to +1."""

    __slots__ = ("_neg",)

    def __init__(self, negative_edges: Iterable[Edge] = ()):
        self._neg = frozenset(canon_edge(*e) for e in negative_edges)

    def __getitem__(self, e: Edge) -> int:
        return -1 if canon_edge(*e) in self._neg else 1

    @property
    def negative_edges(self) -> frozenset:
        return self._neg

    def __eq__(self, other):
        return isinstance(other, CouplingSet) and self._neg == other._neg

    def __hash__(self):
        return hash(self._neg)

    def toggled(self, edges: Iterable[Edge]) -> "CouplingSet":
        out = set(self._neg)
        for e in edges:
            e = canon_edge(*e)
            if e in out:
                out.remove(e)
            else:
                out.add(e)
        return CouplingSet(out)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x1", "y1", "x2", "y2", "J"])
            for (a, b) in sorted(self._neg):
                w.writerow([a[0], a[1], b[0], b[1], -1])

    @classmethod
    def from_csv(cls, path) -> "CouplingSet":
        neg = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                e = canon_edge((int(row["x1"]), int(row["y1"])),
                               (int(row["x2"]), int(row["y2"])))
                if int(row["J"]) == -1:
                    neg.append(e)
        return cls(neg)


def ferromagnet() -> CouplingSet:
    return CouplingSet()


def frustrated_faces(lat: Lattice, coupling: CouplingSet) -> set[DualVertex]:
    """Faces at which every contour has odd degree.

    A face is counted when the product of J over its bounding edges is -1, or
    when an odd number of its outer-ring edges is permanently unsatisfied by
    the frozen spins (the two effects compose by parity).
    """
    out = set()
    for v in lat.dual_vertices():
        parity = 1
        for e in lat.face_primal_edges(v):
            parity *= coupling[e]
            if lat.dual_of_primal(e) is None:
                a, b = e
                parity *= lat.fixed[a] * lat.fixed[b]
        if parity == -1:
            out.add(v)
    return out


def ring_ring_edges(lat: Lattice) -> list[Edge]:
    return [e for e in lat.edges() if lat.dual_of_primal(e) is None]


def make_symmetric_spin_glass(n: int, k: int, p, negative_edges: Iterable[Edge],
                              adjacent_plus: bool = False
                              ) -> tuple[Lattice, CouplingSet]:
    """Spin glass whose frustrated faces are exactly the four v1..v4.

    The caller supplies the J = -1 edge set; construction fails unless the
    resulting frustrated set equals {v1, v2, v3, v4} (automatically placed
    symmetrically on the boundary of the centered side-2n square) and no
    outer-ring edge is made antiferromagnetic.  ``adjacent_plus`` additionally
    freezes the ring of sites next to the boundary to +.
    """
    p = Fraction(p)
    if k is None or k < 2:
        raise LatticeError("k must be >= 2")
    m = k * n
    if (m - 2 * n) % 2 != 0:
        raise LatticeError(f"(k-2)n must be even to center the defect square "
                           f"(k={k}, n={n})")
    lat = Lattice(m, {s: 1 for s in ring_sites_of(m)},
                  mode="glass", n=n, k=k, p=p)
    coupling = CouplingSet(negative_edges)
    ring_ring = set(ring_ring_edges(lat))
    bad_ring = [e for e in coupling.negative_edges if e in ring_ring]
    if bad_ring:
        raise LatticeError(f"boundary edges must stay ferromagnetic: {bad_ring}")
    got = frustrated_faces(lat, coupling)
    want = set(lat.distinguished)
    if got != want:
        raise LatticeError(
            "frustrated faces must be exactly the four distinguished vertices; "
            f"got {sorted(got)}, want {sorted(want)}")
    if adjacent_plus:
        for i in range(1, m + 1):
            for j in (1, m):
                lat.fixed[(i, j)] = 1
                lat.fixed[(j, i)] = 1
        lat.free_sites = [(i, j) for i in range(2, m) for j in range(2, m)]
    return lat, coupling


def canonical_spin_glass(n: int, k: int, p, adjacent_plus: bool = False
                         ) -> tuple[Lattice, CouplingSet]:
    """Reproducible default glass instance.

    Toggles J = -1 along the primal edges crossed by a rotation-symmetric pair
    of dual paths v1 -> v3 and v2 -> v4, which flips face parity exactly at
    the four path endpoints.
    """
    p = Fraction(p)
    m = k * n
    probe = Lattice(m, {s: 1 for s in ring_sites_of(m)},
                    mode="glass", n=n, k=k, p=p)
    mid = m // 2 if m % 2 == 0 else None
    if mid is None:
        raise LatticeError("canonical generator needs an even dual side")

    def dual_path_L(src: DualVertex, dst: DualVertex) -> list[DualVertex]:
        # go vertically to mid height, across, then vertically to dst
        path = [src]
        x, y = src

        def step_to(tx, ty):
            nonlocal x, y
            while y != ty:
                y += 1 if ty > y else -1
                path.append((x, y))
            while x != tx:
                x += 1 if tx > x else -1
                path.append((x, y))

        step_to(x, mid)
        step_to(dst[0], mid)
        step_to(dst[0], dst[1])
        return path

    p13 = dual_path_L(probe.v1, probe.v3)
    p24 = [probe.rot90_dual(v) for v in p13]
    toggles = []
    for path in (p13, p24):
        for a, b in zip(path, path[1:]):
            toggles.append(probe.primal_of_dual(canon_edge(a, b)))
    coupling = CouplingSet().toggled(toggles)
    return make_symmetric_spin_glass(n, k, p, coupling.negative_edges,
                                     adjacent_plus=adjacent_plus)


# -- energies ---------------------------------------------------------------


def hamiltonian(sigma: SpinConfig, coupling: CouplingSet, lat: Lattice) -> int:
    """H = - sum_edges J * s_i * s_j, over every primal edge."""
    h = 0
    sp = sigma.spins
    for a, b in lat.edges():
        h -= coupling[(a, b)] * sp[a] * sp[b]
    return h


def unsat_edge_count(sigma: SpinConfig, coupling: CouplingSet, lat: Lattice) -> int:
    u = 0
    sp = sigma.spins
    for a, b in lat.edges():
        if coupling[(a, b)] * sp[a] * sp[b] < 0:
            u += 1
    return u


def edge_count(lat: Lattice) -> int:
    return 2 * lat.side * (lat.side - 1)


def gibbs_log_weight(sigma: SpinConfig, coupling: CouplingSet, lat: Lattice,
                     params: GibbsParams) -> float:
    """log of the unnormalized weight lam^(-H); exact ratios live in log space."""
    return -hamiltonian(sigma, coupling, lat) * log(float(params.lam))


# -- serialization ------------------------------------------------------------


def lattice_spec_to_json(lat: Lattice, path, seed_adjacent_plus: bool = False) -> None:
    doc = {"mode": lat.mode, "n": lat.n, "k": lat.k,
           "p": [lat.p.numerator, lat.p.denominator] if lat.p is not None else None,
           "seed_adjacent_plus": bool(seed_adjacent_plus)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


def lattice_spec_from_json(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("p") is not None:
        doc["p"] = Fraction(doc["p"][0], doc["p"][1])
    return doc
