"""Dense linear algebra over GF(q) on numpy int64 arrays.

Elimination is blocked: pivots are located with scalar updates restricted to a
column panel, then the accumulated row operations are replayed on the
remaining columns as float64 matmuls. With q <= 65521 and panel width <= 128
every intermediate sum stays below 2**53, so the float path is exact.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 128


def _rref_plain(a: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reference single-pivot Gauss-Jordan; used as an oracle in tests."""
    r = np.array(a, dtype=np.int64) % q
    rows, cols = r.shape
    pivots: list[int] = []
    lead = 0
    for col in range(cols):
        if lead >= rows:
            break
        sub = r[lead:, col]
        nz = np.flatnonzero(sub)
        if nz.size == 0:
            continue
        piv = lead + int(nz[0])
        if piv != lead:
            r[[lead, piv]] = r[[piv, lead]]
        inv = pow(int(r[lead, col]), q - 2, q)
        r[lead] = (r[lead] * inv) % q
        factors = r[:, col].copy()
        factors[lead] = 0
        r = (r - np.outer(factors, r[lead])) % q
        pivots.append(col)
        lead += 1
    return r, pivots


def _mul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Exact (a @ b) % q via float64 BLAS; inner dimension must stay small
    enough that sums fit in 2**53 (true for panels up to 128 and q < 2**16)."""
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return np.rint(prod).astype(np.int64) % q


def rref(
    a: np.ndarray, q: int, block: int = _BLOCK
) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form over GF(q): (R, pivot column list)."""
    r = np.array(a, dtype=np.int64) % q
    rows, cols = r.shape
    if rows == 0 or cols == 0:
        return r, []
    pivots: list[int] = []
    lead = 0
    col_start = 0
    while col_start < cols and lead < rows:
        col_end = min(col_start + block, cols)
        panel = r[:, col_start:col_end].copy()
        panel_pivots: list[int] = []
        local_lead = lead
        for pcol in range(col_end - col_start):
            sub = panel[local_lead:, pcol]
            nz = np.flatnonzero(sub)
            if nz.size == 0:
                continue
            prow = local_lead + int(nz[0])
            if prow != local_lead:
                panel[[local_lead, prow]] = panel[[prow, local_lead]]
                r[[local_lead, prow]] = r[[prow, local_lead]]
            inv = pow(int(panel[local_lead, pcol]), q - 2, q)
            panel[local_lead] = (panel[local_lead] * inv) % q
            factors = panel[:, pcol].copy()
            factors[local_lead] = 0
            panel = (panel - np.outer(factors, panel[local_lead])) % q
            panel_pivots.append(col_start + pcol)
            local_lead += 1
        k = len(panel_pivots)
        if k:
            rest = np.concatenate(
                [np.arange(0, col_start), np.arange(col_end, cols)]
            )
            if rest.size:
                # r's panel columns were not eliminated (only row-swapped), so
                # they still hold the pre-elimination coefficients.
                f = r[:, panel_pivots]
                a11 = f[lead : lead + k, :]
                inv11 = _inv_small(a11, q)
                piv_rest = _mul_mod(inv11, r[np.ix_(range(lead, lead + k), rest)], q)
                others = np.concatenate(
                    [np.arange(0, lead), np.arange(lead + k, rows)]
                )
                if others.size:
                    upd = _mul_mod(f[others, :], piv_rest, q)
                    r[np.ix_(others, rest)] = (r[np.ix_(others, rest)] - upd) % q
                r[np.ix_(range(lead, lead + k), rest)] = piv_rest
            r[:, col_start:col_end] = panel
            pivots.extend(panel_pivots)
            lead += k
        else:
            r[:, col_start:col_end] = panel
        col_start = col_end
    return r, pivots


def _inv_small(a: np.ndarray, q: int) -> np.ndarray:
    k = a.shape[0]
    aug = np.hstack([a % q, np.eye(k, dtype=np.int64)])
    red, piv = _rref_plain(aug, q)
    if piv != list(range(k)):
        raise ValueError("panel pivot block is singular")
    return red[:, k:]


def rank(a: np.ndarray, q: int) -> int:
    _, pivots = rref(a, q)
    return len(pivots)


def nullspace(a: np.ndarray, q: int) -> np.ndarray:
    """Basis of {x : a x = 0} over GF(q), one basis vector per row."""
    a = np.asarray(a, dtype=np.int64)
    _, cols = a.shape
    r, pivots = rref(a, q)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = (-r[row, fc]) % q
    return basis


def solve(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray | None:
    """One solution x of a x = b over GF(q), or None if inconsistent."""
    a = np.asarray(a, dtype=np.int64) % q
    b = np.asarray(b, dtype=np.int64) % q
    aug = np.hstack([a, b.reshape(-1, 1)])
    r, pivots = rref(aug, q)
    cols = a.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for row, pc in enumerate(pivots):
        x[pc] = r[row, cols]
    return x


def right_inverse(a: np.ndarray, q: int) -> np.ndarray:
    """B with a B = I over GF(q); requires full row rank."""
    a = np.asarray(a, dtype=np.int64) % q
    rows, cols = a.shape
    aug = np.hstack([a, np.eye(rows, dtype=np.int64)])
    r, pivots = rref(aug, q)
    if len([p for p in pivots if p < cols]) < rows:
        raise ValueError("matrix does not have full row rank")
    b = np.zeros((cols, rows), dtype=np.int64)
    for row, pc in enumerate(pivots):
        b[pc] = r[row, cols:]
    return b
