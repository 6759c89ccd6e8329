"""Fast-encodable construction: two graph codes plus a mediator code.

An information word eta is encoded per right vertex into the rate-1-left
graph code on G1 (E1); each left vertex's sub-block then gets a syndrome
against the high-rate code C0 (E2); the syndrome list is protected by the
mediator code (E3) and carried on a second, thinner graph code on G2 (E4).
Decoding runs the stages in reverse: one parallel C2 round (D2), a mediator
decode (D3), and coset iterative decoding of (G1, C0(h_u) : C1) (D4).

The stage radii are certified at build time from measured spectral ratios:
the D4 parameters must satisfy the iterative-decoder hypothesis with theta
taken from C0, and the D2/D3 chain must give the mediator fewer than mu*n
wrong symbols whenever 2t + rho <= (1 - R - eps)*n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bigraph import anneal_circulant_bipartite, gamma
from .gf import MAX_MODULUS, PrimeField, is_prime
from .grs import GrsCode
from .iterdec import CosetSide, DecodeParams, DecodeReport, beta_bound, decode_params, decode_phi
from .tanner import PhiWord, TannerCode

ANNEAL_RATIO = 1.5  # achievable multiple of the interlacing floor, with slack
DELTA1_CAP = 160  # desk-scale ceiling on the primary degree


def spectral_floor(n: int, delta: int) -> float:
    """Interlacing lower bound on gamma for any delta-regular bipartite graph."""
    return math.sqrt(delta * (n - delta) / (n - 1)) / delta


def anneal_target(n: int, delta: int, ratio: float = ANNEAL_RATIO) -> float:
    return ratio * spectral_floor(n, delta)


def tau_bound(sigma: float, delta2_rel: float, gamma2: float) -> float:
    """Fraction of wrong mediator symbols after the single C2 round, from the
    expansion bound; infinite when the hypothesis gives nothing."""
    den = delta2_rel / 2 - (1 - gamma2) * sigma
    if den <= 0:
        return math.inf
    return sigma * gamma2 * gamma2 / (den * den)


def next_prime(lo: int) -> int:
    p = max(lo, 3)
    if p % 2 == 0:
        p += 1
    while p <= MAX_MODULUS:
        if is_prime(p):
            return p
        p += 2
    raise ValueError(f"no prime in [{lo}, {MAX_MODULUS}]")


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class LtDesign:
    """Integer parameters of one construction instance.

    The exact identities (syndrome width = rm * R * delta2, equal component
    rates) are enforced in rational arithmetic. `relaxed` marks designs whose
    delta1 sits below the asymptotic alpha_R / eps^3 requirement.
    """

    R: Fraction
    eps: float
    kappa: float
    mu: float
    alpha_R: float
    n: int
    q: int
    delta1: int
    delta2: int
    k0: int
    k1: int
    k2: int
    km: int
    sigma_stage: float
    gamma1_target: float
    gamma2_target: float
    relaxed: bool
    paper_delta1: int

    def __post_init__(self):
        if self.n * self.syndrome_width != self.km * self.k2:
            raise DesignError("identity (1-r0)*delta1 = rm*R*delta2 violated")
        if Fraction(self.k1, self.delta1) != Fraction(self.k2, self.delta2):
            raise DesignError("component rates R1 and R2 differ")
        if not self.delta2 < self.delta1:
            raise DesignError("delta2 must be smaller than delta1")

    @property
    def syndrome_width(self) -> int:
        return self.delta1 - self.k0

    @property
    def r0(self) -> Fraction:
        return Fraction(self.k0, self.delta1)

    @property
    def rm(self) -> Fraction:
        return Fraction(self.km, self.n)

    @property
    def mu_mediator(self) -> Fraction:
        return Fraction((self.n - self.km) // 2, self.n)

    @property
    def theta0(self) -> Fraction:
        return Fraction(self.delta1 - self.k0 + 1, self.delta1)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k1, self.delta1 + self.delta2)

    def to_json(self) -> dict:
        return {
            "R": [self.R.numerator, self.R.denominator],
            "eps": self.eps,
            "kappa": self.kappa,
            "mu": self.mu,
            "alpha_R": self.alpha_R,
            "n": self.n,
            "q": self.q,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "k0": self.k0,
            "k1": self.k1,
            "k2": self.k2,
            "km": self.km,
            "sigma_stage": self.sigma_stage,
            "gamma1_target": self.gamma1_target,
            "gamma2_target": self.gamma2_target,
            "relaxed": self.relaxed,
            "paper_delta1": self.paper_delta1,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LtDesign":
        obj = dict(obj)
        obj["R"] = Fraction(*obj["R"])
        return cls(**obj)


def _stage_checks(
    n: int,
    delta1: int,
    k1: int,
    d0: int,
    gamma1: float,
    sigma_stage: float,
    margin: float = 1.25,
) -> bool:
    # the margin keeps sigma/beta bounded away from 1, so nu and omega stay small
    theta0 = d0 / delta1
    delta1_rel = (delta1 - k1 + 1) / delta1
    if math.sqrt(theta0 * delta1_rel) <= 2 * gamma1:
        return False
    return beta_bound(theta0, delta1_rel, gamma1) > margin * sigma_stage


def _search_k2(
    n: int,
    s: int,
    k1: int,
    R: Fraction,
    sigma_stage: float,
    kappa_floor: Fraction | None,
    mu_floor: float,
) -> tuple[int, int, int] | None:
    """First (k2, delta2, km) meeting the identity and the D2/D3 margin."""
    for k2 in range(s + 1, k1):
        if (n * s) % k2:
            continue
        if (k2 * R.denominator) % R.numerator:
            continue
        delta2 = k2 * R.denominator // R.numerator
        km = n * s // k2
        if km >= n:
            continue
        mu_med = (n - km) // 2 / n
        if mu_med <= 0 or mu_med < mu_floor:
            continue
        if kappa_floor is not None and Fraction(km, n) < kappa_floor:
            continue
        g2t = anneal_target(n, delta2)
        delta2_rel = (delta2 - k2 + 1) / delta2
        if tau_bound(sigma_stage, delta2_rel, g2t) < 0.85 * mu_med:
            return k2, delta2, km
    return None


def lt_design(
    R,
    eps: float,
    kappa: float,
    mu: float,
    n: int,
    delta1_cap: int = DELTA1_CAP,
) -> LtDesign:
    """Choose instance parameters for designed rate R and distance slack eps.

    Emits the paper-faithful parameters when delta1 >= alpha_R/eps^3 fits at
    desk scale; otherwise searches a relaxed design that keeps every exact
    identity and every stage radius hypothesis, flagged relaxed=True.
    """
    Rf = Fraction(R).limit_denominator(1000)
    if not (0 < eps < Rf < 1):
        raise DesignError(f"need 0 < eps < R < 1, got eps={eps}, R={Rf}")
    if not (0 < kappa <= 1 and 0 < mu <= 1):
        raise DesignError("kappa and mu must lie in (0, 1]")
    if eps >= 1 - Rf:
        raise DesignError(
            f"decoding radius (1-R-eps) is empty: eps={eps}, R={Rf}"
        )
    alpha_R = 8 * (1 - float(Rf)) * max(float(Rf) / mu, 2 / kappa)
    paper_delta1 = math.ceil(alpha_R / eps**3)
    sigma_stage = (1 - float(Rf) - eps) / 2
    step = Rf.denominator

    def finish(delta1, d0, k2, delta2, km, relaxed) -> LtDesign:
        q = next_prime(max(delta1 + 1, n))
        return LtDesign(
            R=Rf,
            eps=eps,
            kappa=kappa,
            mu=mu,
            alpha_R=alpha_R,
            n=n,
            q=q,
            delta1=delta1,
            delta2=delta2,
            k0=delta1 - d0 + 1,
            k1=delta1 * Rf.numerator // Rf.denominator,
            k2=k2,
            km=km,
            sigma_stage=sigma_stage,
            gamma1_target=anneal_target(n, delta1),
            gamma2_target=anneal_target(n, delta2),
            relaxed=relaxed,
            paper_delta1=paper_delta1,
        )

    # paper-faithful attempt: theta0 pinned to kappa*eps, kappa and mu honored
    if paper_delta1 <= min(delta1_cap, n - 2):
        delta1 = ((paper_delta1 + step - 1) // step) * step
        if delta1 <= min(delta1_cap, n - 2):
            k1 = delta1 * Rf.numerator // Rf.denominator
            d0 = math.ceil(kappa * eps * delta1)
            if d0 >= 2 and _stage_checks(
                n, delta1, k1, d0, anneal_target(n, delta1), sigma_stage
            ):
                hit = _search_k2(
                    n, d0 - 1, k1, Rf, sigma_stage, Fraction(kappa).limit_denominator(1000), mu
                )
                if hit is not None:
                    k2, delta2, km = hit
                    return finish(delta1, d0, k2, delta2, km, relaxed=False)

    # relaxed search: smallest workable delta1, structural identities intact
    for delta1 in range(2 * step, min(delta1_cap, n - 2) + 1, step):
        k1 = delta1 * Rf.numerator // Rf.denominator
        if k1 < 2:
            continue
        g1t = anneal_target(n, delta1)
        for d0 in range(2, delta1):
            if not _stage_checks(n, delta1, k1, d0, g1t, sigma_stage):
                continue
            hit = _search_k2(n, d0 - 1, k1, Rf, sigma_stage, None, 0.0)
            if hit is not None:
                k2, delta2, km = hit
                return finish(delta1, d0, k2, delta2, km, relaxed=True)
    raise DesignError(
        f"no relaxed design for R={Rf}, eps={eps}, n={n} within delta1 <= {delta1_cap}"
    )


# -- mediator codes ---------------------------------------------------------------


class InterleavedGrsMediator:
    """Bank of width-many [n, km] GRS streams over F; one stream per field
    coordinate of the mediator alphabet. A symbol error touches each stream
    in at most one position, so the bank corrects floor((n-km)/2) symbol
    errors (and trades erasures at the usual 2a + b rate)."""

    kind = "grs"

    def __init__(self, field: PrimeField, n: int, width: int, km: int):
        if n > field.q:
            raise DesignError(f"stream length {n} exceeds field size {field.q}")
        if not 0 < km < n:
            raise DesignError("mediator dimension must satisfy 0 < km < n")
        pts = range(1, n + 1) if n < field.q else range(n)
        self.code = GrsCode(field, k=km, eval_points=pts)
        self.field = field
        self.n = n
        self.symbol_width = width
        self.km = km
        self.rm = Fraction(km, n)
        self.mu = Fraction((n - km) // 2, n)

    def encode(self, s_flat) -> np.ndarray:
        s_flat = np.asarray(s_flat, dtype=np.int64) % self.field.q
        if s_flat.shape != (self.km * self.symbol_width,):
            raise ValueError(f"message must have {self.km * self.symbol_width} symbols")
        msgs = s_flat.reshape(self.km, self.symbol_width)
        return self.code.sys_encode(msgs.T).T.copy()

    def decode(self, values, erased=None) -> np.ndarray | None:
        values = np.asarray(values, dtype=np.int64)
        out = np.empty((self.km, self.symbol_width), dtype=np.int64)
        for j in range(self.symbol_width):
            c = self.code.decode_ee(values[:, j], erased)
            if c is None:
                return None
            out[:, j] = self.code.sys_project(c)
        return out.reshape(-1)


class TannerMediator:
    """Self-hosted mediator: a folded graph-code instance over the mediator
    alphabet, decoded by the iterative decoder."""

    kind = "tanner"

    def __init__(self, code: TannerCode, params: DecodeParams, s_len: int):
        if code.dim < s_len:
            raise DesignError("mediator graph code has too little dimension")
        self.code = code
        self.params = params
        self.field = code.field
        self.n = code.n
        self.symbol_width = code.phi_width
        self.s_len = s_len
        self.rm = Fraction(s_len, self.symbol_width * self.n)
        self.mu = Fraction(math.floor(params.sigma * self.n), self.n)

    def encode(self, s_flat) -> np.ndarray:
        s_flat = np.asarray(s_flat, dtype=np.int64) % self.field.q
        if s_flat.shape != (self.s_len,):
            raise ValueError(f"message must have {self.s_len} symbols")
        msg = np.zeros(self.code.dim, dtype=np.int64)
        msg[: self.s_len] = s_flat
        z = self.code.encode_generic(msg)
        return self.code.psi(z)

    def decode(self, values, erased=None) -> np.ndarray | None:
        if erased is None:
            erased = np.zeros(self.n, dtype=bool)
        word = PhiWord(np.asarray(values, dtype=np.int64), np.asarray(erased, dtype=bool))
        rep = decode_phi(self.code, word, self.params)
        if not rep.success:
            return None
        z = self.code.psi_inverse(rep.result.values)
        return self.code.msg_from_codeword(z)[: self.s_len]


def _scan_tanner_mediator(
    field: PrimeField,
    n: int,
    width: int,
    s_len: int,
    mu_required: float,
    seed: int,
    anneal_iters: int,
) -> TannerMediator | None:
    """Search degrees for a self-hosted mediator whose own decoder hypothesis
    holds at the annealing target; None when the scale does not allow one."""
    per_vertex = math.ceil(s_len / n)
    for delta_m in range(width + 1, min(n - 1, field.q - 1, DELTA1_CAP) + 1):
        k2m = delta_m - width + per_vertex  # dimension bound >= s_len
        if k2m < 1 or k2m >= delta_m:
            continue
        theta_m = (delta_m - width + 1) / delta_m
        delta_rel_m = (delta_m - k2m + 1) / delta_m
        gt = anneal_target(n, delta_m)
        if math.sqrt(theta_m * delta_rel_m) <= 2 * gt:
            continue
        beta = beta_bound(theta_m, delta_rel_m, gt)
        sigma = 0.9 * beta
        if math.floor(sigma * n) < 1:
            continue
        if math.floor(sigma * n) / n <= mu_required:
            continue
        graph = anneal_circulant_bipartite(
            n, delta_m, seed=seed, gamma_target=gt, iters=anneal_iters
        )
        cp = GrsCode(field, k=width, eval_points=range(1, delta_m + 1))
        cd = GrsCode(field, k=k2m, eval_points=range(1, delta_m + 1))
        code = TannerCode(graph, cp, cd)
        gm = gamma(graph).gamma
        params = decode_params(
            code.theta, code.delta_rel, gm, 0.9 * beta_bound(code.theta, code.delta_rel, gm),
            n, delta_m,
        )
        if code.dim < s_len:
            continue
        return TannerMediator(code, params, s_len)
    return None


def mediator_default(
    field: PrimeField,
    n: int,
    width: int,
    s_len: int,
    mu_required: float = 0.0,
    seed: int = 0,
    anneal_iters: int = 30000,
):
    """Mediator for n symbols of `width` field elements carrying s_len message
    elements: a self-hosted graph-code instance when its decoder hypothesis is
    attainable, otherwise the interleaved GRS bank."""
    if s_len % width:
        raise DesignError(
            f"message length {s_len} is not a multiple of the symbol width {width}"
        )
    km = s_len // width
    if km >= n:
        raise DesignError(
            f"mediator rate would be {km}/{n} >= 1; retune the syndrome width"
        )
    hosted = _scan_tanner_mediator(
        field, n, width, s_len, mu_required, seed, anneal_iters
    )
    if hosted is not None:
        return hosted
    grs = InterleavedGrsMediator(field, n, width, km)
    if float(grs.mu) <= mu_required:
        raise DesignError(
            f"no mediator reaches the required correction fraction {mu_required:.4f}"
        )
    return grs


# -- the assembled construction ----------------------------------------------------


@dataclass
class LtReport:
    eta: np.ndarray | None
    stage: str | None  # failing stage: "mediator" or "iterative"; None on success
    d4: DecodeReport | None
    w_tilde: np.ndarray
    w_tilde_erased: np.ndarray

    @property
    def success(self) -> bool:
        return self.eta is not None


@dataclass
class LtTrace:
    x: np.ndarray
    c: np.ndarray
    s: np.ndarray
    w: np.ndarray
    d: np.ndarray


class LtCode:
    """The assembled two-graph construction with certified stage parameters."""

    def __init__(
        self,
        design: LtDesign,
        g1,
        g2,
        mediator,
        field: PrimeField | None = None,
    ):
        self.design = design
        self.field = field or PrimeField(design.q)
        if g1.n != g2.n or g1.n != design.n:
            raise DesignError("both graphs must share the vertex count n")
        if g1.delta != design.delta1 or g2.delta != design.delta2:
            raise DesignError("graph degrees do not match the design")
        self.g1, self.g2 = g1, g2
        self.c0 = GrsCode(self.field, design.k0, range(1, design.delta1 + 1))
        self.c1 = GrsCode(self.field, design.k1, range(1, design.delta1 + 1))
        self.c2 = GrsCode(self.field, design.k2, range(1, design.delta2 + 1))
        full1 = GrsCode(self.field, design.delta1, range(1, design.delta1 + 1))
        full2 = GrsCode(self.field, design.delta2, range(1, design.delta2 + 1))
        self.t1 = TannerCode(g1, full1, self.c1)
        self.t2 = TannerCode(g2, full2, self.c2)
        self.h0 = self.c0.parity_check()
        self.mediator = mediator
        if mediator.n != design.n or mediator.symbol_width != design.k2:
            raise DesignError("mediator shape does not match the design")
        if mediator.rm != design.rm:
            raise DesignError("mediator rate breaks the exact syndrome identity")
        self.gamma1 = gamma(g1).gamma
        self.gamma2 = gamma(g2).gamma
        self.params_d4 = decode_params(
            float(design.theta0),
            self.c1.rel_dist,
            self.gamma1,
            design.sigma_stage,
            design.n,
            design.delta1,
        )
        tb = tau_bound(design.sigma_stage, self.c2.rel_dist, self.gamma2)
        if tb >= float(mediator.mu):
            raise DesignError(
                f"stage-2 bound {tb:.4f} reaches the mediator radius {float(mediator.mu):.4f}"
            )

    @property
    def n(self) -> int:
        return self.design.n

    @property
    def radius(self) -> int:
        """Largest 2t + rho covered by the end-to-end guarantee."""
        return math.floor((1 - float(self.design.R) - self.design.eps) * self.n)

    def encode_trace(self, eta) -> LtTrace:
        d1, d2 = self.design.delta1, self.design.delta2
        c = self.t1.encode_rate1(eta)  # E1
        s = self.c0.syndromes(self.t1.left_blocks(c))  # E2
        w = self.mediator.encode(s.reshape(-1))  # E3
        d = self.t2.encode_rate1(w)  # E4
        x = np.hstack([c.reshape(self.n, d1), d.reshape(self.n, d2)])
        return LtTrace(x=x, c=c, s=s, w=w, d=d)

    def encode(self, eta) -> np.ndarray:
        """eta: (n, R*delta1) information blocks indexed by right vertices."""
        return self.encode_trace(eta).x

    def decode(
        self,
        values,
        erased1=None,
        erased2=None,
    ) -> LtReport:
        """Decode n received pairs; each half may be erased independently."""
        design = self.design
        n, d1, d2 = self.n, design.delta1, design.delta2
        q = self.field.q
        values = np.asarray(values, dtype=np.int64) % q
        if values.shape != (n, d1 + d2):
            raise ValueError(f"received word must be (n, {d1 + d2})")
        erased1 = (
            np.zeros(n, dtype=bool) if erased1 is None else np.asarray(erased1, bool)
        )
        erased2 = (
            np.zeros(n, dtype=bool) if erased2 is None else np.asarray(erased2, bool)
        )

        # D1: load the thin-graph edge word, erasing per left vertex
        z2 = values[:, d1:].reshape(-1).copy()
        z2_er = np.repeat(erased2, d2)
        z2[z2_er] = 0

        # D2: one parallel error-erasure round of C2 per right vertex
        gather = self.g2.right_edges
        blocks = z2[gather]
        masks = z2_er[gather]
        w_tilde = np.zeros((n, design.k2), dtype=np.int64)
        w_er = np.zeros(n, dtype=bool)
        for v in range(n):
            out = self.c2.decode_ee(blocks[v], masks[v] if masks[v].any() else None)
            if out is None:
                w_er[v] = True
            else:
                w_tilde[v] = self.c2.sys_project(out)

        # D3: mediator recovers the syndrome list
        s_flat = self.mediator.decode(w_tilde, w_er)
        if s_flat is None:
            return LtReport(None, "mediator", None, w_tilde, w_er)
        s_mat = s_flat.reshape(n, design.syndrome_width)

        # D4: coset iterative decoding of the primary graph code
        y1 = PhiWord(values[:, :d1].copy(), erased1.copy())
        rep = decode_phi(self.t1, y1, self.params_d4, cosets=CosetSide(self.c0, s_mat))
        if not rep.success:
            return LtReport(None, "iterative", rep, w_tilde, w_er)
        z1 = rep.result.values.reshape(-1)
        eta = self.t1.right_messages(z1)
        return LtReport(eta, None, rep, w_tilde, w_er)


def build_lt_code(design: LtDesign, seed: int, anneal_iters: int = 40000) -> LtCode:
    """Anneal both graphs to their spectral targets and assemble the code."""
    g1 = anneal_circulant_bipartite(
        design.n,
        design.delta1,
        seed=seed,
        gamma_target=design.gamma1_target,
        iters=anneal_iters,
    )
    g2 = anneal_circulant_bipartite(
        design.n,
        design.delta2,
        seed=seed + 1,
        gamma_target=design.gamma2_target,
        iters=anneal_iters,
    )
    field = PrimeField(design.q)
    g2_gamma = gamma(g2).gamma
    c2_rel = (design.delta2 - design.k2 + 1) / design.delta2
    mu_req = tau_bound(design.sigma_stage, c2_rel, g2_gamma)
    mediator = mediator_default(
        field,
        design.n,
        design.k2,
        design.n * design.syndrome_width,
        mu_required=mu_req,
        seed=seed + 2,
        anneal_iters=anneal_iters,
    )
    return LtCode(design, g1, g2, mediator, field=field)
