"""Catalogues of combinatorial types: one JSON line per chamber (or chamber orbit).

For a chamber with signature S the polytope has |S| vertices, two vertices
are adjacent exactly when their bases differ in one column, and the
variables basic in every vertex are the ones that never give a facet.  So
everything stored in an entry is read off the signature.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from . import __version__
from .chambers import ChamberComplex, enumerate_chamber_orbits, enumerate_chambers, signature_hash
from .linalg import fraction_str
from .models import Family, InputError, dimension, expected_rank, marginals_from_rhs
from .structure import gcd_divisibility_check

SCHEMA_VERSION = 1
# largest column counts enumerated without --allow-large: classical 3x4, planar 2x3x3, axial 2x2x3
DESK_LIMITS = {"classical": 12, "planar": 18, "axial": 12}


class ScaleLimitExceeded(InputError):
    pass


def workers() -> int:
    env = os.environ.get("TPOLY_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError("TPOLY_THREADS must be an integer, got %r" % env) from None
    return os.cpu_count() or 1


def load_fixture(name: str) -> dict:
    return json.loads(resources.files("tpoly").joinpath("data", name).read_text())


def expected_rows() -> dict[str, dict[str, list[int]]]:
    return load_fixture("tables.json")["vertex_counts"]


def named_example(name: str) -> dict:
    data = load_fixture("examples.json")
    if name not in data:
        raise InputError("unknown example %r; known: %s" % (name, ", ".join(sorted(data))))
    return data[name]


def check_desk_scale(f: Family, allow_large: bool = False) -> None:
    if allow_large:
        return
    n = f.num_columns
    if n > DESK_LIMITS[f.kind]:
        r = expected_rank(f)
        raise ScaleLimitExceeded(
            "%s has %d columns (limit %d for %s); up to C(%d,%d) = %d basis subsets. "
            "Pass --allow-large to enumerate anyway." % (f, n, DESK_LIMITS[f.kind], f.kind, n, r, math.comb(n, r), ))


# ------------------------------------------------------------------ entries


@dataclass
class CatalogueEntry:
    family: str
    shape: str
    hash: str
    marginals: list[str]  # full right-hand side of B
    vertices: int
    facets: int
    dimension: int
    diameter: int
    regular: bool  # every vertex has degree = dimension
    multiplicity: int = 1  # chambers in the symmetry orbit this entry stands for
    signature: list[list[int]] = field(default_factory=list, repr=False)
    extra: dict = field(default_factory=dict)

    @property
    def sort_key(self) -> tuple:
        return (self.family, self.shape, self.hash)

    def to_json(self) -> dict:
        out = asdict(self)
        if not self.extra:
            del out["extra"]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CatalogueEntry":
        return cls(**data)

    def adjacency(self) -> list[list[int]]:
        return signature_adjacency(self.signature)

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.signature)))
        g.add_edges_from((u, v) for u, nbrs in enumerate(self.adjacency()) for v in nbrs if u < v)
        return g


def signature_adjacency(signature: Sequence[Sequence[int]]) -> list[list[int]]:
    masks = [sum(1 << j for j in b) for b in signature]
    return [[v for v, mv in enumerate(masks) if (mu ^ mv).bit_count() == 2] for mu in masks]


def _diameter(adj: Sequence[Sequence[int]]) -> int:
    n = len(adj)
    if n <= 1:
        return 0
    rows = [u for u, nbrs in enumerate(adj) for _ in nbrs]
    cols = [v for nbrs in adj for v in nbrs]
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    dist = shortest_path(mat, unweighted=True, directed=False)
    if np.isinf(dist).any():
        raise AssertionError("vertex graph is disconnected")
    return int(dist.max())


def entry_from_signature(f: Family, signature: Iterable[Sequence[int]], rhs: Sequence, multiplicity: int = 1
                         ) -> CatalogueEntry:
    sig = sorted(tuple(b) for b in signature)
    adj = signature_adjacency(sig)
    d = dimension(f)
    always = set(sig[0]).intersection(*map(set, sig[1:])) if sig else set()
    return CatalogueEntry(
        family=f.kind,
        shape=f.shape_str,
        hash=signature_hash(sig),
        marginals=[fraction_str(v) for v in rhs],
        vertices=len(sig),
        facets=f.num_columns - len(always),
        dimension=d,
        diameter=_diameter(adj),
        regular=all(len(a) == d for a in adj),
        multiplicity=multiplicity,
        signature=[list(b) for b in sig],
    )


def build_catalogue(f: Family, seed: int = 0, symmetry: bool = False, progress=None) -> list[CatalogueEntry]:
    """One entry per chamber, or per symmetry orbit of chambers when ``symmetry`` is set."""
    cx = ChamberComplex(f)
    if symmetry:
        items = enumerate_chamber_orbits(f, seed=seed, complex_=cx, progress=progress)
    else:
        items = [(ch, 1) for ch in enumerate_chambers(f, seed=seed, complex_=cx, progress=progress)]
    entries = [entry_from_signature(f, ch.signature, ch.marginals, mult) for ch, mult in items]
    entries.sort(key=lambda e: e.sort_key)
    return entries


def distinct_counts(entries: Iterable[CatalogueEntry]) -> list[int]:
    return sorted({e.vertices for e in entries})


def chamber_count(entries: Iterable[CatalogueEntry]) -> int:
    return sum(e.multiplicity for e in entries)


# -------------------------------------------------------------------- files


def catalogue_header(f: Family, seed: int, symmetry: bool) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "family": f.kind,
        "shape": f.shape_str,
        "generator": {"tool": "tpoly", "version": __version__, "seed": seed, "symmetry": symmetry},
        "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


def write_catalogue(path, header: dict, entries: Iterable[CatalogueEntry]) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for e in sorted(entries, key=lambda e: e.sort_key):
            fh.write(json.dumps(e.to_json(), sort_keys=True, separators=(",", ":")) + "\n")


def read_catalogue(path) -> tuple[dict, list[CatalogueEntry]]:
    try:
        with open(path) as fh:
            lines = [line for line in fh if line.strip()]
    except OSError as exc:
        raise InputError("cannot read catalogue %s: %s" % (path, exc)) from None
    if not lines:
        raise InputError("catalogue %s is empty" % path)
    try:
        header = json.loads(lines[0])
        entries = [CatalogueEntry.from_json(json.loads(line)) for line in lines[1:]]
    except (json.JSONDecodeError, TypeError) as exc:
        raise InputError("malformed catalogue %s: %s" % (path, exc)) from None
    if header.get("schema") != SCHEMA_VERSION:
        raise InputError("catalogue %s has schema %r, expected %d" % (path, header.get("schema"), SCHEMA_VERSION))
    return header, entries


def catalogue_files(directory) -> dict[tuple[str, str], Path]:
    """Catalogue files in ``directory`` keyed by (family, shape) from their headers."""
    out = {}
    for p in sorted(Path(directory).glob("*.jsonl")):
        try:
            with open(p) as fh:
                head = json.loads(fh.readline())
        except (OSError, json.JSONDecodeError):
            continue
        if isinstance(head, dict) and "family" in head and "shape" in head:
            out[(head["family"], head["shape"])] = p
    return out


# ------------------------------------------------------------ combinatorial types


def group_types(entries: Sequence[CatalogueEntry]) -> list[tuple[CatalogueEntry, int]]:
    """Entries grouped by isomorphism class of the vertex graph, with chamber counts.

    Non-degenerate polytopes are simple, and a simple polytope's face lattice
    is determined by its graph, so graph isomorphism classes are combinatorial
    types.
    """
    buckets: dict[tuple, list[tuple[nx.Graph, CatalogueEntry, list[int]]]] = {}
    for e in entries:
        g = e.graph()
        key = (e.vertices, g.number_of_edges(), nx.weisfeiler_lehman_graph_hash(g, iterations=3))
        classes = buckets.setdefault(key, [])
        for gg, rep, count in classes:
            if nx.is_isomorphic(g, gg):
                count[0] += e.multiplicity
                break
        else:
            classes.append((g, e, [e.multiplicity]))
    out = [(rep, count[0]) for classes in buckets.values() for _, rep, count in classes]
    out.sort(key=lambda item: (item[0].vertices, item[0].hash))
    return out


def type_vertex_counts(entries: Sequence[CatalogueEntry]) -> list[int]:
    """Sorted multiset of vertex counts, one per combinatorial type."""
    return sorted(rep.vertices for rep, _ in group_types(entries))


# ---------------------------------------------------------------- verification


@dataclass
class RowCheck:
    name: str
    status: str  # pass, fail, skipped
    detail: str = ""


def verify_tables(directory) -> list[RowCheck]:
    """Compare each catalogue in ``directory`` with the embedded table rows, then run
    the divisibility check and the planar 2x2xn / classical 2xn comparison."""
    files = catalogue_files(directory)
    loaded: dict[tuple[str, str], list[CatalogueEntry]] = {}
    checks = []
    for kind, rows in expected_rows().items():
        for shape, expected in rows.items():
            name = "%s %s" % (kind, shape)
            path = files.get((kind, shape))
            if path is None:
                checks.append(RowCheck(name, "skipped", "no catalogue"))
                continue
            _, entries = read_catalogue(path)
            loaded[(kind, shape)] = entries
            got = distinct_counts(entries)
            if got == expected:
                checks.append(RowCheck(name, "pass", " ".join(map(str, got))))
            else:
                checks.append(RowCheck(name, "fail", "expected %s, got %s" % (expected, got)))
    for (kind, shape), entries in sorted(loaded.items()):
        if kind != "classical":
            continue
        m, n = map(int, shape.split("x"))
        rep = gcd_divisibility_check(m, n, {e.vertices for e in entries})
        checks.append(RowCheck("gcd %s" % shape, "pass" if rep.ok else "fail",
                               "divisor %d, violations %s" % (rep.divisor, rep.violations)))
    for (kind, shape), entries in sorted(loaded.items()):
        if kind != "planar" or not shape.startswith("2x2x"):
            continue
        other = loaded.get(("classical", "2x" + shape.split("x")[2]))
        name = "planar %s vs classical 2x%s" % (shape, shape.split("x")[2])
        if other is None:
            checks.append(RowCheck(name, "skipped", "no classical catalogue"))
            continue
        a, b = type_vertex_counts(entries), type_vertex_counts(other)
        checks.append(RowCheck(name, "pass" if a == b else "fail",
                               "%d types each" % len(a) if a == b else "planar %s, classical %s" % (a, b)))
    return checks


# ----------------------------------------------------------------- conjectures


def hamiltonian_cycle(adj: Sequence[Sequence[int]], budget: int = 200_000) -> list[int] | None | bool:
    """A Hamiltonian cycle, ``None`` if there is none, or ``False`` if the search budget ran out."""
    n = len(adj)
    if n < 3:
        return None
    nbrs = [set(a) for a in adj]
    path, on = [0], [False] * n
    on[0] = True
    steps = 0

    def extend() -> bool | None:
        nonlocal steps
        steps += 1
        if steps > budget:
            return None
        last = path[-1]
        if len(path) == n:
            return 0 in nbrs[last]
        # fewest onward options first
        cand = sorted((v for v in nbrs[last] if not on[v]), key=lambda v: sum(not on[w] for w in nbrs[v]))
        for v in cand:
            path.append(v)
            on[v] = True
            res = extend()
            if res:
                return True
            path.pop()
            on[v] = False
            if res is None:
                return None
        return False

    res = extend()
    if res is None:
        return False
    return list(path) if res else None


@dataclass
class ConjectureRow:
    hash: str
    vertices: int
    facets: int
    dimension: int
    diameter: int
    hamiltonian: str  # yes, no, unknown

    @property
    def hirsch_gap(self) -> int:
        return (self.facets - self.dimension) - self.diameter


def _conjecture_row(e: CatalogueEntry) -> ConjectureRow:
    res = hamiltonian_cycle(e.adjacency())
    ham = "yes" if isinstance(res, list) else ("unknown" if res is False else "no")
    return ConjectureRow(e.hash, e.vertices, e.facets, e.dimension, e.diameter, ham)


def conjecture_report(entries: Sequence[CatalogueEntry]) -> list[ConjectureRow]:
    """Hamiltonicity and diameter against f - d for every entry; tabulated, never asserted."""
    n = workers()
    if n > 1 and len(entries) > 200:
        with ProcessPoolExecutor(max_workers=n) as pool:
            return list(pool.map(_conjecture_row, entries, chunksize=64))
    return [_conjecture_row(e) for e in entries]
