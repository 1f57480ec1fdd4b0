"""Independent exhaustive oracle: the exact maximum size of a valid set of
residues for a given modulus and magnitude bound, with a witness.

A set is valid exactly when it is an independent set of admissible vertices
in the conflict graph (vertices: residues whose own products e*x mod q are
distinct and nonzero; edges: pairs whose product sets intersect).  The
search is a deterministic branch-and-bound maximum-independent-set solver:

* greedy clique-cover upper bounds (a greedy coloring of the complement),
  rebuilt from the candidate set at every node, lowest vertex first;
* branching on the candidate of maximum residual degree (lex tie-break);
* connected components solved independently;
* a unit-symmetry root split: scaling by a unit maps valid sets to valid
  sets, so any optimum containing a unit can be scaled to contain 1 —
  the optimum is max(1 + best excluding the closed neighborhood of vertex
  1, best over non-unit vertices only);
* an optional second phase that rebuilds the witness as the
  lexicographically smallest optimum (the first phase proves the value,
  the second fixes elements ascending, each confirmed by a feasibility
  search).

`nodes_expanded` counts the branch-and-bound nodes of the optimization
phase only (the witness phase is deterministic but not counted), so
repeated runs on the same inputs report identical numbers.

Results can be persisted to an append-only JSONL cache keyed by (q, lam);
only exactly-solved records are reused.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass
from typing import Iterable, Optional

__all__ = [
    "Budget",
    "ConflictGraph",
    "SearchResult",
    "SearchCache",
    "syndrome_set",
    "is_admissible",
    "conflict_graph",
    "exact_max",
    "exact_max_in_subset",
    "default_cache_path",
    "DEFAULT_CACHE_FILENAME",
    "CACHE_ENV_VAR",
]

DEFAULT_CACHE_FILENAME = "magset-cache.jsonl"
CACHE_ENV_VAR = "MAGSET_CACHE"


@dataclass(frozen=True)
class Budget:
    """Search limits: whichever of node count / wall time trips first."""

    max_nodes: int = 10**8
    max_seconds: float = 60.0


DEFAULT_BUDGET = Budget()


def syndrome_set(x: int, q: int, lam: int = 4) -> frozenset[int]:
    """The products {e*x mod q : 1 <= e <= lam}."""
    return frozenset(e * x % q for e in range(1, lam + 1))


def is_admissible(x: int, q: int, lam: int = 4) -> bool:
    """Whether {x} alone is valid: lam distinct nonzero products."""
    s = syndrome_set(x, q, lam)
    return len(s) == lam and 0 not in s


@dataclass(frozen=True)
class ConflictGraph:
    """Admissible residues with the syndrome-collision adjacency."""

    q: int
    lam: int
    vertices: tuple[int, ...]
    neighbors: dict[int, frozenset[int]]


def conflict_graph(q: int, lam: int = 4,
                   allowed: Optional[Iterable[int]] = None) -> ConflictGraph:
    """Build the conflict graph on Z_q (or on `allowed` residues only).

    Two admissible vertices conflict iff some e*x == e'*y (mod q) with
    e, e' in [1, lam]; grouping all vertices by each product value makes
    every product-sharing group a clique.
    """
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    universe = range(1, q) if allowed is None else sorted({x % q for x in allowed} - {0})
    verts = [x for x in universe if is_admissible(x, q, lam)]
    buckets: dict[int, list[int]] = {}
    for x in verts:
        for s in syndrome_set(x, q, lam):
            buckets.setdefault(s, []).append(x)
    nb: dict[int, set[int]] = {x: set() for x in verts}
    for group in buckets.values():
        for i, x in enumerate(group):
            for y in group[i + 1:]:
                nb[x].add(y)
                nb[y].add(x)
    return ConflictGraph(q, lam, tuple(verts),
                         {x: frozenset(n) for x, n in nb.items()})


@dataclass(frozen=True)
class SearchResult:
    q: int
    lam: int
    max_size: int
    witness: tuple[int, ...]
    nodes_expanded: int
    elapsed: float
    exact: bool  # False: budget exhausted, max_size is only a lower bound

    def to_record(self) -> dict:
        return {
            "q": self.q,
            "lambda": self.lam,
            "max_size": self.max_size,
            "witness": list(self.witness),
            "nodes": self.nodes_expanded,
            "ms": round(self.elapsed * 1000.0, 3),
            "exact": self.exact,
        }


def default_cache_path() -> str:
    """Cache location: $MAGSET_CACHE if set, else ./magset-cache.jsonl."""
    return os.environ.get(CACHE_ENV_VAR) or os.path.join(".", DEFAULT_CACHE_FILENAME)


class SearchCache:
    """Append-only JSONL store of exactly-solved search results."""

    def __init__(self, path: Optional[str]) -> None:
        self.path = path
        self._mem: dict[tuple[int, int], SearchResult] = {}
        self._loaded = path is None

    def _load(self) -> None:
        if self._loaded:
            return
        self._loaded = True
        try:
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                        if not rec.get("exact"):
                            continue
                        res = SearchResult(
                            q=int(rec["q"]), lam=int(rec["lambda"]),
                            max_size=int(rec["max_size"]),
                            witness=tuple(int(x) for x in rec["witness"]),
                            nodes_expanded=int(rec["nodes"]),
                            elapsed=float(rec["ms"]) / 1000.0, exact=True)
                        self._mem[(res.q, res.lam)] = res
                    except (KeyError, TypeError, ValueError):
                        continue  # tolerate foreign/corrupt lines
        except FileNotFoundError:
            pass

    def get(self, q: int, lam: int) -> Optional[SearchResult]:
        self._load()
        return self._mem.get((q, lam))

    def put(self, result: SearchResult) -> None:
        if not result.exact:
            return
        self._load()
        if (result.q, result.lam) in self._mem:
            return
        self._mem[(result.q, result.lam)] = result
        if self.path is not None:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(result.to_record()) + "\n")


class _Core:
    """Bitmask branch-and-bound over one conflict graph (index space)."""

    def __init__(self, neigh: list[int], budget: Budget, t0: float) -> None:
        self.neigh = neigh
        self.budget = budget
        self.t0 = t0
        self.nodes = 0
        self.exact = True
        self.best_size = 0
        self.best_mask = 0
        self.found_mask = 0

    def _tripped(self) -> bool:
        if self.nodes >= self.budget.max_nodes:
            self.exact = False
        elif not self.nodes & 1023 and \
                time.monotonic() - self.t0 > self.budget.max_seconds:
            self.exact = False
        return not self.exact

    def _cover_bound(self, cand: int) -> int:
        # Greedy clique cover of the candidates, rebuilt at every node:
        # take the lowest remaining vertex, grow a clique around it by
        # repeatedly absorbing the lowest candidate adjacent to every
        # member so far.  An independent set holds at most one vertex per
        # clique, so the number of cliques bounds what cand can add.
        neigh = self.neigh
        bound = 0
        rem = cand
        while rem:
            v = (rem & -rem).bit_length() - 1
            rem &= rem - 1
            clique = neigh[v] & rem
            while clique:
                low = clique & -clique
                rem ^= low
                clique &= neigh[low.bit_length() - 1]
            bound += 1
        return bound

    def maximize(self, cand0: int, start_count: int = 0, start_mask: int = 0) -> None:
        """Optimize mode: update best_size/best_mask over IS extending start."""
        if start_count > self.best_size or (start_count == self.best_size
                                            and not self.best_mask and start_mask):
            self.best_size, self.best_mask = start_count, start_mask
        stack = [(cand0, start_count, start_mask)]
        while stack:
            if self._tripped():
                return
            cand, cnt, mask = stack.pop()
            self.nodes += 1
            cand, cnt, mask = self._strip(cand, cnt, mask)
            if not cand:
                if cnt > self.best_size:
                    self.best_size, self.best_mask = cnt, mask
                continue
            if cnt + self._cover_bound(cand) <= self.best_size:
                continue
            v = self._branch_vertex(cand)
            vbit = 1 << v
            stack.append((cand & ~vbit, cnt, mask))  # exclude v
            stack.append((cand & ~(self.neigh[v] | vbit), cnt + 1, mask | vbit))

    def exists(self, cand0: int, need: int) -> bool:
        """Decision mode: is there an independent set of size >= need?

        On success, ``found_mask`` holds one such set (possibly larger).
        """
        self.found_mask = 0
        if need <= 0:
            return True
        stack = [(cand0, 0, 0)]
        while stack:
            if self._tripped():
                return False
            cand, cnt, mask = stack.pop()
            self.nodes += 1
            cand, cnt, mask = self._strip(cand, cnt, mask)
            if cnt >= need:
                self.found_mask = mask
                return True
            g_size, g_mask = self._greedy(cand)
            if cnt + g_size >= need:
                self.found_mask = mask | g_mask
                return True
            if not cand or cnt + self._cover_bound(cand) < need:
                continue
            v = self._branch_vertex(cand)
            vbit = 1 << v
            stack.append((cand & ~vbit, cnt, mask))
            stack.append((cand & ~(self.neigh[v] | vbit), cnt + 1, mask | vbit))
        return False

    def _greedy(self, cand: int) -> tuple[int, int]:
        # Quick feasibility lower bound: repeatedly take the lowest
        # candidate and drop its closed neighborhood.
        size, mask = 0, 0
        while cand:
            low = cand & -cand
            mask |= low
            size += 1
            cand &= ~(self.neigh[low.bit_length() - 1] | low)
        return size, mask

    def _strip(self, cand: int, cnt: int, mask: int) -> tuple[int, int, int]:
        # vertices with no conflicts among the candidates are always taken
        iso = 0
        c = cand
        while c:
            low = c & -c
            c ^= low
            if not self.neigh[low.bit_length() - 1] & cand:
                iso |= low
        if iso:
            cand &= ~iso
            cnt += iso.bit_count()
            mask |= iso
        return cand, cnt, mask

    def _branch_vertex(self, cand: int) -> int:
        best_deg, best_v = -1, -1
        c = cand
        while c:
            low = c & -c
            c ^= low
            i = low.bit_length() - 1
            deg = (self.neigh[i] & cand).bit_count()
            if deg > best_deg:  # ascending scan: ties keep the smallest index
                best_deg, best_v = deg, i
        return best_v


def _components(neigh: list[int], mask: int) -> list[int]:
    comps = []
    todo = mask
    while todo:
        seed = todo & -todo
        comp = seed
        frontier = seed
        while frontier:
            grown = comp
            c = frontier
            while c:
                low = c & -c
                c ^= low
                grown |= neigh[low.bit_length() - 1] & mask
            frontier = grown & ~comp
            comp = grown
        comps.append(comp)
        todo &= ~comp
    return comps


def _maximize_over(core: _Core, cand: int) -> tuple[int, int]:
    """Maximize component-wise; returns (total size, union mask)."""
    total, mask = 0, 0
    for comp in _components(core.neigh, cand):
        sub = _Core(core.neigh, core.budget, core.t0)
        sub.nodes = core.nodes
        sub.maximize(comp)
        core.nodes = sub.nodes
        core.exact = core.exact and sub.exact
        total += sub.best_size
        mask |= sub.best_mask
        if not core.exact:
            break
    return total, mask


def _lexmin_witness(core: _Core, full_mask: int, target: int,
                    seed_mask: int) -> tuple[int, bool]:
    """Smallest optimum in sorted-tuple order: fix vertices ascending,
    each confirmed by a feasibility search over the larger indices.

    ``seed_mask`` must be one known optimum; any candidate lying in the
    currently known optimum is consistent by construction and is accepted
    without a search, and every successful search donates its witness as
    the new known optimum -- only rejections pay for a full search.
    """
    chosen_mask = 0
    chosen = 0
    cand = full_mask
    known = seed_mask  # an IS of size target - chosen inside cand
    while chosen < target:
        if not cand:
            return chosen_mask, False  # cannot happen with a true target
        low = cand & -cand
        i = low.bit_length() - 1
        sub = cand & ~(core.neigh[i] | low)
        if known & low:
            chosen_mask |= low
            chosen += 1
            cand = sub
            known &= ~low  # rest of the known optimum avoids N[low]
            continue
        probe = _Core(core.neigh, core.budget, core.t0)
        found = probe.exists(sub, target - chosen - 1)
        if not probe.exact:
            return chosen_mask, False
        if found:
            chosen_mask |= low
            chosen += 1
            cand = sub
            known = probe.found_mask
        else:
            cand &= ~low
    return chosen_mask, True


def _mask_to_residues(mask: int, verts: tuple[int, ...]) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        mask ^= low
        out.append(verts[low.bit_length() - 1])
    return tuple(sorted(out))


def _run(graph: ConflictGraph, budget: Budget, lex_witness: bool,
         unit_split: bool) -> SearchResult:
    t0 = time.monotonic()
    verts = graph.vertices
    index = {x: i for i, x in enumerate(verts)}
    neigh = [0] * len(verts)
    for x, ns in graph.neighbors.items():
        m = 0
        for y in ns:
            m |= 1 << index[y]
        neigh[index[x]] = m
    full = (1 << len(verts)) - 1
    core = _Core(neigh, budget, t0)

    if not verts:
        return SearchResult(graph.q, graph.lam, 0, (), 0, time.monotonic() - t0, True)

    if unit_split and 1 in index:
        # any optimum containing a unit scales to one containing vertex 1
        one = 1 << index[1]
        with_one_cand = full & ~(neigh[index[1]] | one)
        size_a, mask_a = _maximize_over(core, with_one_cand)
        size_a, mask_a = size_a + 1, mask_a | one
        nonunit = 0
        for x, i in index.items():
            if math.gcd(x, graph.q) != 1:
                nonunit |= 1 << i
        size_b, mask_b = _maximize_over(core, nonunit)
        best_size, best_mask = max((size_a, mask_a), (size_b, mask_b),
                                   key=lambda p: p[0])
    else:
        best_size, best_mask = _maximize_over(core, full)

    nodes = core.nodes
    exact = core.exact
    if exact and lex_witness and best_size > 0:
        lex_mask, ok = _lexmin_witness(core, full, best_size, best_mask)
        if ok:
            best_mask = lex_mask
    witness = _mask_to_residues(best_mask, verts)
    return SearchResult(graph.q, graph.lam, best_size, witness, nodes,
                        time.monotonic() - t0, exact)


def exact_max(q: int, lam: int = 4, budget: Optional[Budget] = None,
              cache: Optional[SearchCache] = None,
              lex_witness: bool = True,
              unit_split: bool = True) -> SearchResult:
    """Exact maximum valid-set size for modulus q (with lex-min witness).

    Returns a budget-exhausted lower bound (exact=False) instead of
    raising when the search is cut off.
    """
    if cache is not None:
        hit = cache.get(q, lam)
        if hit is not None:
            return hit
    result = _run(conflict_graph(q, lam), budget or DEFAULT_BUDGET,
                  lex_witness, unit_split)
    if cache is not None:
        cache.put(result)
    return result


def exact_max_in_subset(q: int, lam: int, allowed: Iterable[int],
                        budget: Optional[Budget] = None,
                        lex_witness: bool = True) -> SearchResult:
    """Exact maximum valid set confined to `allowed` residues.

    No unit-symmetry split here: an arbitrary allowed set need not be
    closed under unit scaling.  Results are not cached (the cache is
    keyed by (q, lam) only).
    """
    return _run(conflict_graph(q, lam, allowed), budget or DEFAULT_BUDGET,
                lex_witness, unit_split=False)
