"""Graded free modules, graded maps, and finitely presented modules.

Twist bookkeeping convention: ``FreeModule.twists`` lists generator degrees,
so twists (d_0, .., d_r) is the module S(-d_0) + .. + S(-d_r).  A nonzero
matrix entry e_ij of a graded map must be homogeneous of degree
source.twists[j] - target.twists[i].
"""

from __future__ import annotations

from .ring import GradedRing, Polynomial, RingError


class GradedCompatibilityError(ValueError):
    """A matrix entry has the wrong degree for its twist slot pair."""


class FreeModule:
    __slots__ = ("ring", "twists")

    def __init__(self, ring: GradedRing, twists):
        self.ring = ring
        self.twists = tuple(int(t) for t in twists)

    @property
    def rank(self) -> int:
        return len(self.twists)

    def shifted(self, a: int) -> "FreeModule":
        """Twist by O(a): every generator degree drops by a."""
        return FreeModule(self.ring, tuple(t - a for t in self.twists))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeModule)
            and self.ring == other.ring
            and self.twists == other.twists
        )

    def __repr__(self) -> str:
        return f"FreeModule(twists={self.twists})"


class GradedMap:
    """Matrix of homogeneous polynomials between graded free modules.

    Row i is a target slot, column j a source slot.  Zero entries may be
    stored as None or as the zero polynomial.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FreeModule, target: FreeModule, matrix, check: bool = True):
        if source.ring != target.ring:
            raise RingError("graded map across different rings")
        rows = []
        for i in range(target.rank):
            row = []
            for j in range(source.rank):
                e = matrix[i][j] if matrix else None
                if e is not None and e.is_zero():
                    e = None
                row.append(e)
            rows.append(tuple(row))
        self.source = source
        self.target = target
        self.matrix = tuple(rows)
        if check:
            self._check_grading()

    def _check_grading(self) -> None:
        for i in range(self.target.rank):
            for j in range(self.source.rank):
                e = self.matrix[i][j]
                if e is None:
                    continue
                if not e.is_homogeneous():
                    raise GradedCompatibilityError(
                        f"entry ({i},{j}) is not homogeneous: {e}"
                    )
                want = self.source.twists[j] - self.target.twists[i]
                if e.degree() != want:
                    raise GradedCompatibilityError(
                        f"entry ({i},{j}) has degree {e.degree()}, expected {want}"
                    )

    @property
    def ring(self) -> GradedRing:
        return self.source.ring

    def entry(self, i: int, j: int) -> Polynomial:
        e = self.matrix[i][j]
        return self.ring.zero() if e is None else e

    def column(self, j: int) -> dict:
        """Column j as a sparse {row_slot: Polynomial} vector."""
        out = {}
        for i in range(self.target.rank):
            e = self.matrix[i][j]
            if e is not None:
                out[i] = e
        return out

    def columns(self) -> list[dict]:
        return [self.column(j) for j in range(self.source.rank)]

    def is_zero(self) -> bool:
        return all(
            self.matrix[i][j] is None
            for i in range(self.target.rank)
            for j in range(self.source.rank)
        )

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self o other (apply other first)."""
        if other.target != self.source:
            raise RingError("maps do not compose")
        ring = self.ring
        rows = []
        for i in range(self.target.rank):
            row = []
            for j in range(other.source.rank):
                acc = ring.zero()
                for k in range(self.source.rank):
                    a = self.matrix[i][k]
                    b = other.matrix[k][j]
                    if a is not None and b is not None:
                        acc = acc + a * b
                row.append(acc)
            rows.append(row)
        return GradedMap(other.source, self.target, rows, check=False)

    def shifted(self, a: int) -> "GradedMap":
        return GradedMap(
            self.source.shifted(a), self.target.shifted(a), self.matrix, check=False
        )

    @staticmethod
    def from_columns(source: FreeModule, target: FreeModule, cols) -> "GradedMap":
        ring = source.ring
        rows = [
            [None] * source.rank for _ in range(target.rank)
        ]
        for j, col in enumerate(cols):
            for i, poly in col.items():
                rows[i][j] = poly
        return GradedMap(source, target, rows)

    def __repr__(self) -> str:
        return f"GradedMap({self.source.twists} -> {self.target.twists})"


class PresentedModule:
    """Cokernel of a graded map: the universal sheaf representation.

    ``relations`` maps into ``generators``; the module is coker(relations).
    Derived data (Groebner bases, resolutions, saturations) is cached
    write-once in ``_cache``.
    """

    __slots__ = ("generators", "relations", "name", "metadata", "_cache")

    def __init__(
        self,
        generators: FreeModule,
        relations: GradedMap | None = None,
        name: str = "",
        metadata: dict | None = None,
    ):
        if relations is None:
            relations = GradedMap(
                FreeModule(generators.ring, ()), generators, [], check=False
            )
        if relations.target != generators:
            raise RingError("relations must map into the generator module")
        self.generators = generators
        self.relations = relations
        self.name = name
        self.metadata = dict(metadata or {})
        self._cache: dict = {}

    @property
    def ring(self) -> GradedRing:
        return self.generators.ring

    def cached(self, key: str, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return (
            f"PresentedModule{tag}(gens={self.generators.twists}, "
            f"rels={self.relations.source.twists})"
        )


def free_module_presentation(ring: GradedRing, twists, name: str = "") -> PresentedModule:
    return PresentedModule(FreeModule(ring, twists), None, name=name)


def structure_sheaf(ring: GradedRing) -> PresentedModule:
    return free_module_presentation(ring, (0,), name="O")


def line_bundle(ring: GradedRing, d: int) -> PresentedModule:
    """O(d), i.e. S(d): one generator in degree -d."""
    return free_module_presentation(ring, (-d,), name=f"O({d})")
