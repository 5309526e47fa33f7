"""Network simplex for the transportation problem, plus optimal-face geometry.

Rows ``0..n-1`` and columns ``0..m-1`` of the cost matrix are the two sides
of a bipartite graph; a basis is a spanning tree of ``n + m - 1`` cells.
The same code runs on ``Fraction`` object arrays (exact, Bland's rule) and on
float arrays (Dantzig pricing with a Bland fallback after a run of
degenerate pivots).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# consecutive degenerate pivots tolerated in float mode before switching to Bland
_DEGENERATE_RUN = 50


@dataclass
class Basis:
    cells: list  # (i, j) pairs forming a spanning tree
    values: dict  # (i, j) -> flow


def _zero_like(arr):
    return Fraction(0) if arr.dtype == object else 0.0


def northwest_corner(a, b) -> Basis:
    n, m = len(a), len(b)
    a = list(a)
    b = list(b)
    zero = Fraction(0) if isinstance(a[0], Fraction) else 0.0
    cells, values = [], {}
    i = j = 0
    while True:
        if i == n - 1:
            x = b[j]
        elif j == m - 1:
            x = a[i]
        else:
            x = a[i] if a[i] <= b[j] else b[j]
        if x < 0:
            x = zero
        cells.append((i, j))
        values[(i, j)] = x
        a[i] -= x
        b[j] -= x
        if i == n - 1 and j == m - 1:
            break
        if i == n - 1:
            j += 1
        elif j == m - 1:
            i += 1
        elif a[i] <= b[j]:
            i += 1
        else:
            j += 1
    return Basis(cells, values)


def potentials(C, cells):
    """Dual potentials (u, v) with u_0 = 0 and u_i + v_j = C_ij on the tree."""
    n, m = C.shape
    adj = [[] for _ in range(n + m)]
    for (i, j) in cells:
        adj[i].append(n + j)
        adj[n + j].append(i)
    exact = C.dtype == object
    u = np.empty(n, dtype=object) if exact else np.zeros(n)
    v = np.empty(m, dtype=object) if exact else np.zeros(m)
    seen = [False] * (n + m)
    u[0] = _zero_like(C)
    seen[0] = True
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for nb in adj[node]:
            if seen[nb]:
                continue
            seen[nb] = True
            if node < n:
                v[nb - n] = C[node, nb - n] - u[node]
            else:
                u[nb] = C[nb, node - n] - v[node - n]
            queue.append(nb)
    if not all(seen):
        raise RuntimeError("basis is not a spanning tree")
    return u, v


def _tree_path(n, cells, start, goal):
    """Cells on the tree path between nodes ``start`` and ``goal`` (ordered from start)."""
    adj = {}
    for (i, j) in cells:
        adj.setdefault(i, []).append((n + j, (i, j)))
        adj.setdefault(n + j, []).append((i, (i, j)))
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for nb, cell in adj.get(node, ()):
            if nb not in parent:
                parent[nb] = (node, cell)
                queue.append(nb)
    path = []
    node = goal
    while parent[node] is not None:
        prev, cell = parent[node]
        path.append(cell)
        node = prev
    path.reverse()
    return path


def network_simplex(C, a, b, basis: Basis | None = None, allowed=None, tol: float = 0.0, max_iter: int = 1_000_000):
    """Solve ``min sum C_ij X_ij`` over couplings of ``a`` and ``b``.

    ``allowed`` (boolean mask) restricts pricing to a subset of cells; the
    starting ``basis`` must then lie inside that subset.  Returns
    ``(X, basis, u, v)`` with ``u_i + v_j <= C_ij`` on allowed cells.
    """
    n, m = C.shape
    exact = C.dtype == object
    if basis is None:
        basis = northwest_corner(a, b)
    cells = list(basis.cells)
    values = dict(basis.values)
    in_basis = set(cells)
    bland = exact
    degenerate_run = 0
    order = {(i, j): i * m + j for i in range(n) for j in range(m)} if n * m <= 4096 else None

    def index(cell):
        return order[cell] if order is not None else cell[0] * m + cell[1]

    for _ in range(max_iter):
        u, v = potentials(C, cells)
        if exact:
            R = C - u[:, None] - v[None, :]
            neg = R < 0
            if allowed is not None:
                neg &= allowed
            hits = np.argwhere(neg)
            if len(hits) == 0:
                break
            enter = tuple(int(t) for t in hits[0])
        else:
            R = C - u[:, None] - v[None, :]
            if allowed is not None:
                R = np.where(allowed, R, np.inf)
            if bland:
                hits = np.argwhere(R < -tol)
                if len(hits) == 0:
                    break
                enter = tuple(int(t) for t in hits[0])
            else:
                k = int(np.argmin(R))
                if R.flat[k] >= -tol:
                    break
                enter = divmod(k, m)
        if enter in in_basis:
            raise RuntimeError("entering cell already basic")

        path = _tree_path(n, cells, n + enter[1], enter[0])
        minus = path[0::2]
        plus = path[1::2]
        theta = min(values[c] for c in minus)
        leave = min((c for c in minus if values[c] == theta), key=index)
        for c in plus:
            values[c] += theta
        for c in minus:
            values[c] -= theta
        del values[leave]
        values[enter] = theta
        cells.remove(leave)
        in_basis.discard(leave)
        cells.append(enter)
        in_basis.add(enter)
        if not exact:
            degenerate_run = degenerate_run + 1 if theta <= tol else 0
            if degenerate_run > _DEGENERATE_RUN:
                bland = True
    else:
        raise RuntimeError("network simplex iteration cap reached")

    X = np.empty((n, m), dtype=object) if exact else np.zeros((n, m))
    if exact:
        X[...] = Fraction(0)
    for c, x in values.items():
        X[c] = x if (exact or x > 0) else 0.0
    return X, Basis(cells, values), u, v


# ----------------------------------------------------------------------------
# optimal-face geometry


def is_forest(cells, n) -> bool:
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    for (i, j) in cells:
        ri, rj = find(i), find(n + j)
        if ri == rj:
            return False
        parent[ri] = rj
    return True


def alternating_cycles(Z, P):
    """Simple cycles alternating (+ on a ``Z`` cell, - on a ``P`` cell).

    Each yields ``(plus_cells, minus_cells)``.  Cycles are rooted at their
    smallest row, first edge ``+``; each (cycle, orientation) appears once.
    """
    n, m = Z.shape
    zrow = [list(np.flatnonzero(Z[i])) for i in range(n)]
    pcol = [list(np.flatnonzero(P[:, j])) for j in range(m)]

    def extend(s, col, plus, minus, rows, cols):
        for r in pcol[col]:
            if r == s:
                if len(plus) >= 2:
                    yield list(plus), minus + [(s, col)]
                continue
            if r < s or r in rows:
                continue
            rows.add(r)
            for c2 in zrow[r]:
                if c2 in cols:
                    continue
                cols.add(c2)
                yield from extend(s, c2, plus + [(r, c2)], minus + [(r, col)], rows, cols)
                cols.discard(c2)
            rows.discard(r)

    for s in range(n):
        for j in zrow[s]:
            yield from extend(s, j, [(s, j)], [], {s}, {j})


def adjacent_vertices(X, Z, tol: float = 0.0):
    """Vertices of ``{Y >= 0, same marginals as X, supp Y within Z}`` adjacent to vertex ``X``."""
    n, _ = X.shape
    P = X > tol
    for plus, minus in alternating_cycles(Z, P):
        theta = min(X[c] for c in minus)
        Y = X.copy()
        for c in plus:
            Y[c] = Y[c] + theta
        for c in minus:
            Y[c] = Y[c] - theta
        if X.dtype != object:
            Y[np.abs(Y) <= tol] = 0.0
        support = [tuple(int(t) for t in c) for c in np.argwhere(Y > tol)]
        if is_forest(support, n):
            yield Y
