"""Experiment harness: build instances, run seeded channels, verify bounds.

Instances are canonical JSON (sorted keys, fixed indentation) and trial logs
are CSV, so identical seeds reproduce byte-identical files. Exit codes:
0 success, 1 contract violation detected, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .bigraph import (
    BipartiteRegularGraph,
    GammaTargetError,
    anneal_circulant_bipartite,
    check_degree_sum,
    check_expansion_lemma,
    check_mixing_lemma,
    circulant_bipartite,
    gamma,
    ramanujan_bound,
    random_regular_bipartite,
)
from .channel import corrupt_inner_rows, corrupt_pairs, corrupt_phi, trial_rng
from .gf import PrimeField
from .gmd import ConcatCode
from .grs import GrsCode
from .iterdec import beta_bound, decode_params, decode_phi
from .ltenc import (
    DesignError,
    LtCode,
    LtDesign,
    build_lt_code,
    lt_design,
    mediator_default,
    tau_bound,
)
from .tanner import TannerCode, brute_min_phi_weight, min_dist_bound, rate_bound_phi

log = logging.getLogger("aramid")


class ContractError(RuntimeError):
    """A spec-level contract the harness refuses to violate silently."""


EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

BRUTE_EDGE_LIMIT = 256  # generator/enumeration oracles only below this size
BRUTE_WORD_LIMIT = 10**6


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(obj))


def read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def grs_to_json(code: GrsCode) -> dict:
    return {
        "k": code.k,
        "eval_points": code.eval_points.tolist(),
        "col_mults": code.col_mults.tolist(),
    }


def grs_from_json(field: PrimeField, obj: dict) -> GrsCode:
    return GrsCode(field, obj["k"], obj["eval_points"], obj["col_mults"])


# -- plain (folded graph code) instances ----------------------------------------


def build_plain_instance(cfg: dict, allow_weak: bool) -> dict:
    n = cfg["n"]
    delta = cfg["delta"]
    q = cfg["q"]
    seed = cfg["seed"]
    kind = cfg.get("graph", "circulant")
    target = cfg.get("gamma_target")
    if kind == "circulant":
        graph = anneal_circulant_bipartite(
            n, delta, seed=seed, gamma_target=target,
            iters=cfg.get("anneal_iters", 30000),
        )
    elif kind == "random":
        graph = random_regular_bipartite(
            n, delta, seed=seed, gamma_target=target,
            max_resamples=cfg.get("max_resamples", 200),
        )
    else:
        raise ValueError(f"unknown graph kind {kind!r}")
    field = PrimeField(q)
    cp = GrsCode(field, cfg["k_prime"], range(1, delta + 1))
    cd = GrsCode(field, cfg["k_double"], range(1, delta + 1))
    code = TannerCode(graph, cp, cd)
    prof = gamma(graph)
    theta, delta_rel = code.theta, code.delta_rel
    # the decoder hypothesis needs sqrt(theta*delta) > 2*gamma > 0
    weak = prof.gamma <= 0 or math.sqrt(theta * delta_rel) <= 2 * prof.gamma
    if weak and not allow_weak:
        raise ContractError(
            f"instance violates sqrt(theta*delta) > 2*gamma "
            f"(gamma={prof.gamma:.4f}); pass --allow-weak to keep it"
        )
    derived = {
        "gamma": prof.gamma,
        "lambda2": prof.lambda2,
        "theta": [cp.dmin, delta],
        "delta": [cd.dmin, delta],
        "ramanujan": prof.gamma <= ramanujan_bound(delta),
        "theorem1_bound": min_dist_bound(theta, delta_rel, prof.gamma),
        "rate_bound_phi": rate_bound_phi(code.r, code.R),
        "weak": weak,
    }
    if not weak:
        beta = beta_bound(theta, delta_rel, prof.gamma)
        sigma = cfg.get("sigma_frac", 0.9) * beta
        params = decode_params(theta, delta_rel, prof.gamma, sigma, n, delta)
        derived.update(
            beta=beta,
            sigma=sigma,
            nu=params.nu,
            i_t=params.i_t,
            omega=params.omega,
        )
    return {
        "mode": "plain",
        "config": cfg,
        "field": {"q": q},
        "graph": graph.to_json(),
        "c_prime": grs_to_json(cp),
        "c_double": grs_to_json(cd),
        "derived": derived,
    }


def load_plain_instance(obj: dict):
    field = PrimeField(obj["field"]["q"])
    graph = BipartiteRegularGraph.from_json(obj["graph"])
    cp = grs_from_json(field, obj["c_prime"])
    cd = grs_from_json(field, obj["c_double"])
    code = TannerCode(graph, cp, cd)
    derived = obj["derived"]
    params = None
    if not derived.get("weak"):
        params = decode_params(
            code.theta,
            code.delta_rel,
            derived["gamma"],
            derived["sigma"],
            code.n,
            graph.delta,
        )
    return code, params, derived


# -- trial runners -----------------------------------------------------------------


def _phi_trial(code, params, seed, idx, t_fixed, rho_fixed, sigma_n):
    rng = trial_rng(seed, idx)
    msg = rng.integers(0, code.field.q, size=code.dim)
    z = code.encode_generic(msg)
    x = code.psi(z)
    if t_fixed is None:
        t = int(rng.integers(0, math.floor(sigma_n) + 1))
    else:
        t = t_fixed
    if rho_fixed is None:
        rho = int(rng.integers(0, max(math.floor(2 * (sigma_n - t)), 0) + 1))
    else:
        rho = rho_fixed
    y = corrupt_phi(rng, x, t, rho, code.field.q)
    rep = decode_phi(code, y, params)
    ok = rep.success and np.array_equal(rep.result.values, x)
    return idx, int(ok), rep.rounds_run, rep.component_calls


def run_phi_trials(code, params, seed, trials, t, rho, threads=1):
    sigma_n = params.sigma * code.n
    code.generator()  # precompute before any thread fan-out
    work = (
        lambda idx: _phi_trial(code, params, seed, idx, t, rho, sigma_n)
    )
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, range(trials)))
    else:
        rows = [work(i) for i in range(trials)]
    rows.sort(key=lambda r: r[0])
    return rows


def out_paths(out: str) -> tuple[str, str]:
    base = out
    for suffix in (".json", ".csv"):
        if base.endswith(suffix):
            base = base[: -len(suffix)]
    return base + ".csv", base + ".json"


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- subcommands ----------------------------------------------------------------------


def cmd_build(args) -> int:
    cfg = read_json(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    mode = cfg.get("mode", "plain")
    if mode == "plain":
        instance = build_plain_instance(cfg, args.allow_weak)
    elif mode == "lt":
        design = lt_design(
            R=fraction_tuple(cfg["R"]),
            eps=cfg["eps"],
            kappa=cfg["kappa"],
            mu=cfg["mu"],
            n=cfg["n"],
        )
        code = build_lt_code(design, cfg["seed"], cfg.get("anneal_iters", 40000))
        instance = {
            "mode": "lt",
            "config": cfg,
            "design": design.to_json(),
            "seed": cfg["seed"],
            "anneal_iters": cfg.get("anneal_iters", 40000),
            "g1": code.g1.to_json(),
            "g2": code.g2.to_json(),
            "mediator": {"kind": code.mediator.kind, "seed": cfg["seed"] + 2},
            "derived": {
                "gamma1": code.gamma1,
                "gamma2": code.gamma2,
                "beta": code.params_d4.beta,
                "nu": code.params_d4.nu,
                "omega": code.params_d4.omega,
                "radius": code.radius,
                "rate": [design.rate.numerator, design.rate.denominator],
                "mediator_mu": [
                    code.mediator.mu.numerator,
                    code.mediator.mu.denominator,
                ],
                "relaxed": design.relaxed,
            },
        }
    else:
        log.error("unknown mode %r", mode)
        return EXIT_USAGE
    write_json(args.out, instance)
    log.info("wrote %s", args.out)
    return EXIT_OK


def fraction_tuple(x):
    from fractions import Fraction

    return Fraction(x[0], x[1]) if isinstance(x, (list, tuple)) else Fraction(x)


def load_lt_instance(obj: dict) -> LtCode:
    design = LtDesign.from_json(obj["design"])
    g1 = BipartiteRegularGraph.from_json(obj["g1"])
    g2 = BipartiteRegularGraph.from_json(obj["g2"])
    field = PrimeField(design.q)
    g2_gamma = gamma(g2).gamma
    c2_rel = (design.delta2 - design.k2 + 1) / design.delta2
    mediator = mediator_default(
        field,
        design.n,
        design.k2,
        design.n * design.syndrome_width,
        mu_required=tau_bound(design.sigma_stage, c2_rel, g2_gamma),
        seed=obj["mediator"]["seed"],
        anneal_iters=obj.get("anneal_iters", 40000),
    )
    return LtCode(design, g1, g2, mediator, field=field)


def cmd_run(args) -> int:
    instance = read_json(args.instance)
    if instance.get("mode") != "plain":
        log.error("run expects a plain instance; use lt-run / gmd-run otherwise")
        return EXIT_USAGE
    code, params, derived = load_plain_instance(instance)
    if params is None:
        log.error("instance is weak (no valid decode params); rebuild without --allow-weak")
        return EXIT_USAGE
    sigma_n = params.sigma * code.n
    t, rho = args.errors, args.erasures
    out_of_contract = False
    if t is not None and rho is not None and t + rho / 2 > sigma_n:
        if not args.allow_weak:
            log.error(
                "t + rho/2 = %.1f exceeds sigma*n = %.2f; pass --allow-weak to run anyway",
                t + rho / 2,
                sigma_n,
            )
            return EXIT_USAGE
        out_of_contract = True
    rows = run_phi_trials(
        code, params, args.seed, args.trials, t, rho, threads=args.threads
    )
    csv_path, json_path = out_paths(args.out)
    with open(csv_path, "w") as fh:
        fh.write(rows_to_csv(["trial", "success", "rounds", "calls"], rows))
    successes = sum(r[1] for r in rows)
    report = {
        "instance": os.path.basename(args.instance),
        "seed": args.seed,
        "trials": args.trials,
        "errors": t,
        "erasures": rho,
        "out_of_contract": out_of_contract,
        "success_rate": successes / len(rows),
        "max_rounds": max(r[2] for r in rows),
        "max_calls": max(r[3] for r in rows),
        "nu": params.nu,
        "omega_n_bound": params.omega * code.n,
    }
    write_json(json_path, report)
    log.info("success rate %.4f over %d trials", report["success_rate"], args.trials)
    if not out_of_contract and report["success_rate"] < 1.0:
        log.error("in-contract trials failed; decoder contract violated")
        return EXIT_VIOLATION
    return EXIT_OK


def _sweep_mixing_and_expansion(graph) -> tuple[int, int]:
    vals = (0.0, 0.5, 1.0)
    checked = conforming = 0
    for left in itertools.product(vals, repeat=graph.n):
        for right in itertools.product(vals, repeat=graph.n):
            check_mixing_lemma(graph, left, right)
            checked += 1
            if gamma(graph).gamma > 0:
                if check_expansion_lemma(graph, left, right, 1.0) is not None:
                    conforming += 1
    return checked, conforming


def _sweep_degree_sum(graph) -> int:
    n = graph.n
    checked = 0
    for smask in range(1 << n):
        for tmask in range(1 << n):
            if smask == 0 and tmask == 0:
                continue
            left = [i for i in range(n) if smask >> i & 1]
            right = [i for i in range(n) if tmask >> i & 1]
            check_degree_sum(graph, left, right)
            checked += 1
    return checked


def cmd_verify_bounds(args) -> int:
    instance = read_json(args.instance)
    code, params, derived = load_plain_instance(instance)
    graph = code.graph
    results = {}

    prof = gamma(graph)  # asserts the top eigenpair structure to 1e-9
    results["lemma_a1_eigenstructure"] = "pass"

    if graph.num_edges <= BRUTE_EDGE_LIMIT:
        dim = code.dim
        if code.field.q**dim <= BRUTE_WORD_LIMIT and dim > 0:
            w = brute_min_phi_weight(code, BRUTE_WORD_LIMIT)
            bound = math.ceil(
                code.n * min_dist_bound(code.theta, code.delta_rel, prof.gamma)
                - 1e-12
            )
            results["theorem1_min_phi_weight"] = (
                "pass" if w >= bound else f"FAIL ({w} < {bound})"
            )
    if graph.n <= 4:
        _sweep_mixing_and_expansion(graph)
        _sweep_degree_sum(graph)
        results["mixing_lemma_exhaustive"] = "pass"
        results["degree_sum_exhaustive"] = "pass"

    for name, fixture in (
        ("k33", circulant_bipartite(3, [0, 1, 2])),
        ("cycle8", circulant_bipartite(4, [0, 1])),
    ):
        _sweep_mixing_and_expansion(fixture)
        _sweep_degree_sum(fixture)
        results[f"mixing_lemma_{name}"] = "pass"
        results[f"degree_sum_{name}"] = "pass"

    if args.runs:
        rep = read_json(args.runs)
        ok = rep["max_calls"] <= rep["omega_n_bound"]
        results["omega_n_audit"] = (
            "pass"
            if ok
            else f"FAIL ({rep['max_calls']} > {rep['omega_n_bound']})"
        )

    for name, outcome in sorted(results.items()):
        print(f"[{name}] {outcome}")
    if args.out:
        write_json(args.out, results)
    return EXIT_OK if all(v == "pass" for v in results.values()) else EXIT_VIOLATION


def cmd_lt_run(args) -> int:
    instance = read_json(args.instance)
    if instance.get("mode") != "lt":
        log.error("lt-run expects an lt instance")
        return EXIT_USAGE
    code = load_lt_instance(instance)
    d = code.design
    radius = code.radius
    rows = []
    mu_n = float(code.mediator.mu) * d.n
    lemma3_ok = True
    for idx in range(args.trials):
        rng = trial_rng(args.seed, idx)
        eta = rng.integers(0, d.q, size=(d.n, d.k1))
        trace = code.encode_trace(eta)
        if args.errors is not None:
            t = args.errors
            rho = args.erasures or 0
        else:
            t = int(rng.integers(0, radius // 2 + 1))
            rho = int(rng.integers(0, radius - 2 * t + 1))
        values, er1, er2 = corrupt_pairs(rng, trace.x, t, rho, d.q)
        rep = code.decode(values, er1, er2)
        ok = rep.success and np.array_equal(rep.eta, eta)
        w_dist = int(
            np.count_nonzero(
                np.any(rep.w_tilde != trace.w, axis=1) | rep.w_tilde_erased
            )
        )
        if w_dist >= mu_n:
            lemma3_ok = False
        rounds = rep.d4.rounds_run if rep.d4 else 0
        calls = rep.d4.component_calls if rep.d4 else 0
        rows.append((idx, int(ok), rounds, calls, w_dist))
    csv_path, json_path = out_paths(args.out)
    with open(csv_path, "w") as fh:
        fh.write(rows_to_csv(["trial", "success", "rounds", "calls", "w_dist"], rows))
    report = {
        "instance": os.path.basename(args.instance),
        "seed": args.seed,
        "trials": args.trials,
        "radius_2t_plus_rho": radius,
        "success_rate": sum(r[1] for r in rows) / len(rows),
        "max_w_dist": max(r[4] for r in rows),
        "mediator_mu_n": mu_n,
        "lemma3_instrumentation": "pass" if lemma3_ok else "FAIL",
    }
    write_json(json_path, report)
    if report["success_rate"] < 1.0 or not lemma3_ok:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_gmd_run(args) -> int:
    instance = read_json(args.instance)
    if instance.get("mode") != "plain":
        log.error("gmd-run expects a plain instance for the outer code")
        return EXIT_USAGE
    code, params, derived = load_plain_instance(instance)
    if params is None:
        log.error("instance is weak; gmd-run needs valid decode params")
        return EXIT_USAGE
    inner_len = args.inner_length or code.graph.delta
    inner = GrsCode(code.field, code.phi_width, range(1, inner_len + 1))
    concat = ConcatCode(code, inner, params)
    budget = int(math.ceil(concat.guaranteed_radius())) - 1
    ladder_bound = concat.ladder_length
    rows = []
    for idx in range(args.trials):
        rng = trial_rng(args.seed, idx)
        msg = rng.integers(0, code.field.q, size=code.dim)
        mat = concat.encode(msg)
        rec = corrupt_inner_rows(rng, mat, budget, inner.dmin, code.field.q)
        got, trace = concat.decode(rec)
        ok = got is not None and np.array_equal(got, msg)
        rows.append((idx, int(ok), len(trace.attempts)))
    csv_path, json_path = out_paths(args.out)
    with open(csv_path, "w") as fh:
        fh.write(rows_to_csv(["trial", "success", "outer_calls"], rows))
    report = {
        "instance": os.path.basename(args.instance),
        "seed": args.seed,
        "trials": args.trials,
        "inner": [inner.length, inner.k, inner.dmin],
        "weighted_budget": budget,
        "success_rate": sum(r[1] for r in rows) / len(rows),
        "max_outer_calls": max(r[2] for r in rows),
        "ladder_bound": ladder_bound,
        "zyablov_point": {
            "rate": inner.rate * rate_bound_phi(code.r, code.R),
            "distance": inner.rel_dist * derived["theorem1_bound"],
        },
    }
    write_json(json_path, report)
    if report["success_rate"] < 1.0 or report["max_outer_calls"] > ladder_bound:
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv=None) -> int:
    level = os.environ.get("ARAMID_LOG", "info").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format="%(message)s")
    parser = argparse.ArgumentParser(
        prog="aramid", description="graph-code experiment harness"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct an instance file from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--allow-weak", action="store_true")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("run", help="seeded error-erasure trials on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--errors", type=int, default=None)
    p.add_argument("--erasures", type=int, default=None)
    p.add_argument("--allow-weak", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("verify-bounds", help="run the bound oracles on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--runs", default=None, help="run report for the omega*n audit")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_verify_bounds)

    p = sub.add_parser("lt-run", help="end-to-end trials of the staged construction")
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--errors", type=int, default=None)
    p.add_argument("--erasures", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_lt_run)

    p = sub.add_parser("gmd-run", help="concatenated GMD trials on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--inner-length", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gmd_run)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ContractError, GammaTargetError, DesignError) as exc:
        log.error("%s", exc)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
