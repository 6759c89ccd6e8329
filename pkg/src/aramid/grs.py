"""Generalized Reed-Solomon codes with bounded-distance error-erasure decoding.

A codeword is (v_i * p(a_i))_{i < length} for a polynomial p of degree < k,
evaluation points a_i pairwise distinct and column multipliers v_i nonzero.
These codes are MDS: d = length - k + 1. The decoder is syndrome-based
(Berlekamp-Massey key equation, Chien search, Forney values) and returns None
whenever it cannot certify a codeword within the radius 2*errors + erasures < d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .gf import PrimeField

ERASED = object()  # marker for erased symbols in sequence form


@dataclass
class ErasureWord:
    """A received word with an explicit erasure mask (never a field value)."""

    values: np.ndarray  # int64, erased entries arbitrary
    erased: np.ndarray  # bool

    @classmethod
    def from_symbols(cls, symbols) -> "ErasureWord":
        values = np.array(
            [0 if s is ERASED or s is None else int(s) for s in symbols],
            dtype=np.int64,
        )
        erased = np.array([s is ERASED or s is None for s in symbols], dtype=bool)
        return cls(values, erased)


class GrsCode:
    """A [length, k, length-k+1] generalized Reed-Solomon code over GF(q)."""

    def __init__(self, field: PrimeField, k: int, eval_points, col_mults=None):
        self.field = field
        q = field.q
        pts = np.asarray(eval_points, dtype=np.int64) % q
        if col_mults is None:
            col_mults = np.ones(len(pts), dtype=np.int64)
        mults = np.asarray(col_mults, dtype=np.int64) % q
        n = len(pts)
        if n > q:
            raise ValueError(f"length {n} exceeds field size {q}")
        if not 0 < k <= n:
            raise ValueError(f"dimension must satisfy 0 < k <= {n}, got {k}")
        if len(np.unique(pts)) != n:
            raise ValueError("evaluation points must be pairwise distinct")
        if len(mults) != n or np.any(mults == 0):
            raise ValueError("column multipliers must be nonzero, one per position")
        self.length = n
        self.k = k
        self.dmin = n - k + 1
        self.eval_points = pts
        self.col_mults = mults

        # Locators must be nonzero for the key equation; shifting the points
        # by a common s leaves the code and the dual multipliers unchanged.
        shift = 0
        while np.any((pts + shift) % q == 0):
            shift += 1
            if shift > q:
                raise ValueError("cannot find nonzero locators (length == q)")
        self._locators = (pts + shift) % q
        x = self._locators
        diff = (x[:, None] - x[None, :]) % q
        np.fill_diagonal(diff, 1)
        prod = np.ones(n, dtype=np.int64)
        for j in range(n):
            prod = (prod * diff[:, j]) % q
        self._dual_mults = np.array(
            [pow(int((mults[i] * prod[i]) % q), q - 2, q) for i in range(n)],
            dtype=np.int64,
        )
        nsyn = self.dmin - 1
        # Alternant parity check H[l, i] = u_i * x_i^l; rank = n - k.
        pw = np.ones(n, dtype=np.int64)
        rows = []
        for _ in range(nsyn):
            rows.append((pw * self._dual_mults) % q)
            pw = (pw * x) % q
        self._parity = (
            np.array(rows, dtype=np.int64)
            if rows
            else np.zeros((0, n), dtype=np.int64)
        )
        self._parity_t = np.ascontiguousarray(self._parity.T)
        # Inverse-locator power table for Chien search / Forney evaluation.
        xi = np.array([pow(int(v), q - 2, q) for v in x], dtype=np.int64)
        self._inv_pow = np.ones((n, nsyn + 1), dtype=np.int64)
        for m in range(1, nsyn + 1):
            self._inv_pow[:, m] = (self._inv_pow[:, m - 1] * xi) % q

        # Monomial generator G[j, i] = v_i * a_i^j.
        g = np.empty((k, n), dtype=np.int64)
        pw = np.ones(n, dtype=np.int64)
        for j in range(k):
            g[j] = (mults * pw) % q
            pw = (pw * pts) % q
        self._gen = g
        self._sys_gen = None
        self._right_inv = None

    @property
    def rate(self) -> float:
        return self.k / self.length

    @property
    def rel_dist(self) -> float:
        return self.dmin / self.length

    def __repr__(self) -> str:
        return f"GrsCode([{self.length},{self.k},{self.dmin}] over GF({self.field.q}))"

    # -- encoding ---------------------------------------------------------

    def encode(self, msg) -> np.ndarray:
        """Evaluate the polynomial with coefficient vector msg."""
        msg = np.asarray(msg, dtype=np.int64) % self.field.q
        if msg.shape[-1] != self.k:
            raise ValueError(f"message length must be {self.k}, got {msg.shape[-1]}")
        return (msg @ self._gen) % self.field.q

    def sys_generator(self) -> np.ndarray:
        """Generator in systematic form: identity on the first k positions."""
        if self._sys_gen is None:
            r, pivots = linalg.rref(self._gen, self.field.q)
            assert pivots == list(range(self.k))  # any k GRS columns independent
            self._sys_gen = r
        return self._sys_gen

    def sys_encode(self, msg) -> np.ndarray:
        msg = np.asarray(msg, dtype=np.int64) % self.field.q
        if msg.shape[-1] != self.k:
            raise ValueError(f"message length must be {self.k}, got {msg.shape[-1]}")
        return (msg @ self.sys_generator()) % self.field.q

    def sys_project(self, codeword) -> np.ndarray:
        """Inverse of sys_encode: projection onto the systematic positions."""
        return np.asarray(codeword, dtype=np.int64)[..., : self.k] % self.field.q

    # -- syndromes and membership ------------------------------------------

    def parity_check(self) -> np.ndarray:
        """Canonical (alternant-form) parity-check matrix, (d-1) x length."""
        return self._parity

    def syndromes(self, words: np.ndarray) -> np.ndarray:
        """Syndrome rows for one word (shape (n,)) or a batch (m, n)."""
        return (np.asarray(words, dtype=np.int64) @ self._parity_t) % self.field.q

    def is_codeword(self, word) -> bool:
        return not np.any(self.syndromes(word))

    # -- decoding -----------------------------------------------------------

    def decode_word(self, word: ErasureWord) -> np.ndarray | None:
        return self.decode_ee(word.values, word.erased)

    def decode_errors(self, values) -> np.ndarray | None:
        """Errors-only bounded-distance decoding (corrects 2a < d)."""
        return self.decode_ee(values, None)

    def decode_ee(
        self,
        values,
        erased=None,
        syndromes: np.ndarray | None = None,
    ) -> np.ndarray | None:
        """Error-erasure decoding: correct any pattern with 2a + b < d.

        Returns the unique such codeword, or None when no codeword can be
        certified inside the radius. `syndromes` may carry a precomputed
        syndrome row for the zero-filled word.
        """
        q = self.field.q
        values = np.asarray(values, dtype=np.int64) % q
        if values.shape != (self.length,):
            raise ValueError(f"word length must be {self.length}")
        if erased is not None and np.any(erased):
            erased = np.asarray(erased, dtype=bool)
            filled = np.where(erased, 0, values)
            era_pos = np.flatnonzero(erased)
        else:
            erased = None
            filled = values
            era_pos = None
        b = 0 if era_pos is None else len(era_pos)
        d = self.dmin
        if b >= d:
            return None
        if d == 1:
            return filled.copy()
        nsyn = d - 1
        if syndromes is None or b > 0:
            synd = self.syndromes(filled)
        else:
            synd = np.asarray(syndromes, dtype=np.int64)
        if b == 0 and not np.any(synd):
            return filled.copy()

        s_list = [int(v) for v in synd]
        if b > 0:
            gamma = self._locator_poly(era_pos)
            xi = _poly_mul_trunc(gamma, s_list, nsyn, q)
            zeta = xi[b:]
        else:
            gamma = [1]
            zeta = s_list

        if any(zeta):
            lam, deg = _berlekamp_massey(zeta, q)
            if deg > (nsyn - b) // 2 or len(lam) - 1 != deg:
                return None
        else:
            lam = [1]
        psi = _poly_mul(lam, gamma, q)
        roots = self._find_roots(psi)
        if len(roots) != len(psi) - 1:
            return None

        omega = _poly_mul_trunc(psi, s_list, nsyn, q)
        dpsi = [(m * c) % q for m, c in enumerate(psi)][1:]  # formal derivative
        corrected = filled.copy()
        for i in roots:
            inv_pows = [int(v) for v in self._inv_pow[i]]
            num = 0
            for m, c in enumerate(omega):
                num = (num + c * inv_pows[m]) % q
            den = 0
            for m, c in enumerate(dpsi):
                den = (den + c * inv_pows[m]) % q
            if den == 0:
                return None
            ev = (-int(self._locators[i]) * num * pow(den, q - 2, q)) % q
            e = (ev * pow(int(self._dual_mults[i]), q - 2, q)) % q
            corrected[i] = (corrected[i] - e) % q

        if np.any(self.syndromes(corrected)):
            return None
        changed = corrected != values
        if erased is not None:
            changed &= ~erased
        a = int(np.count_nonzero(changed))
        if 2 * a + b >= d:
            return None
        return corrected

    def _locator_poly(self, positions) -> list[int]:
        """Product of (1 - x_i X) over the given positions, ascending coeffs."""
        q = self.field.q
        poly = [1]
        for i in positions:
            xi = int(self._locators[i])
            poly = [
                (poly[m] - (xi * poly[m - 1] if m else 0)) % q
                for m in range(len(poly))
            ] + [(-xi * poly[-1]) % q]
        return poly

    def _find_roots(self, psi: list[int]) -> list[int]:
        """Positions i with psi(x_i^{-1}) = 0 via the inverse-power table."""
        q = self.field.q
        deg = len(psi) - 1
        vals = (self._inv_pow[:, : deg + 1] @ np.array(psi, dtype=np.int64)) % q
        return [int(i) for i in np.flatnonzero(vals == 0)]

    # -- coset decoding ------------------------------------------------------

    def parity_right_inverse(self) -> np.ndarray:
        if self._right_inv is None:
            self._right_inv = linalg.right_inverse(self._parity, self.field.q)
        return self._right_inv

    def coset_shift(self, h) -> np.ndarray:
        """Some t with H t = h (H the canonical parity check)."""
        h = np.asarray(h, dtype=np.int64) % self.field.q
        if h.shape != (self.dmin - 1,):
            raise ValueError(f"syndrome length must be {self.dmin - 1}")
        return (self.parity_right_inverse() @ h) % self.field.q

    def coset_decode(self, h, values) -> np.ndarray | None:
        """Nearest word v with H v = h, within radius 2a < d of values."""
        q = self.field.q
        t = self.coset_shift(h)
        base = self.decode_errors((np.asarray(values, dtype=np.int64) - t) % q)
        if base is None:
            return None
        return (base + t) % q

    # -- oracles --------------------------------------------------------------

    def all_codewords(self, limit: int = 10**6) -> np.ndarray:
        """Every codeword, for exhaustive checks on tiny codes."""
        q = self.field.q
        total = q**self.k
        if total > limit:
            raise ValueError(f"enumeration of {total} codewords exceeds limit {limit}")
        msgs = np.indices((q,) * self.k).reshape(self.k, total).T
        return self.encode(msgs)

    def min_distance_brute(self, limit: int = 10**6) -> int:
        words = self.all_codewords(limit)
        weights = np.count_nonzero(words, axis=1)
        return int(weights[weights > 0].min())


def _poly_mul(a: list[int], b: list[int], q: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % q
    return out


def _poly_mul_trunc(a: list[int], b: list[int], n: int, q: int) -> list[int]:
    out = [0] * n
    for i, ai in enumerate(a):
        if ai and i < n:
            for j, bj in enumerate(b[: n - i]):
                out[i + j] = (out[i + j] + ai * bj) % q
    return out


def _berlekamp_massey(seq: list[int], q: int) -> tuple[list[int], int]:
    """Shortest LFSR (connection polynomial, ascending) for seq over GF(q)."""
    c = [1]
    b = [1]
    el = 0
    m = 1
    bb = 1
    for n_i, s_n in enumerate(seq):
        disc = s_n
        for i in range(1, el + 1):
            if i < len(c):
                disc = (disc + c[i] * seq[n_i - i]) % q
        if disc == 0:
            m += 1
        elif 2 * el <= n_i:
            t = c[:]
            coef = (disc * pow(bb, q - 2, q)) % q
            c = c + [0] * (len(b) + m - len(c)) if len(b) + m > len(c) else c
            for j, bj in enumerate(b):
                c[j + m] = (c[j + m] - coef * bj) % q
            el = n_i + 1 - el
            b = t
            bb = disc
            m = 1
        else:
            coef = (disc * pow(bb, q - 2, q)) % q
            if len(b) + m > len(c):
                c = c + [0] * (len(b) + m - len(c))
            for j, bj in enumerate(b):
                c[j + m] = (c[j + m] - coef * bj) % q
            m += 1
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c, el
