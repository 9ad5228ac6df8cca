"""Command line surface over the toolkit.

Every artifact embeds a reproducibility manifest (command, parameters,
tolerances, grid settings, version, wall clock).  Output is deterministic:
fixed row order, floats at 9 significant digits, so two runs with the same
manifest differ only in the wall clock line.  Report-style commands that
write a CSV also render a matplotlib figure next to it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .distill import (
    NoiseVector,
    coarse_bounds,
    distillable_region_qutrit,
    gamma_star,
    iterate_depolarizing,
    iteration_valid,
    quadratic_bound_constant,
    success_probability_floor,
    threshold_depolarizing,
    threshold_worst_case,
    yield_for_target,
)
from .gates import EmptySetError, canonical_gate, gate_exists, verify_membership
from .injection import (
    DensityMatrix,
    inject,
    injection_deviation,
    phase_state_of,
    resource_infidelity,
)
from .oracle import (
    SIZE_LIMIT,
    magic_basis,
    simulate_round,
    transversality_defect,
    trichotomy_check,
)
from .qrm import build_qrm, code_distance, validate_css, verify_transversality

DIMS = (2, 3, 5, 7, 11, 13, 17, 19)
ORDERS = (1, 2, 3, 4)
DENSE_CHECK_LIMIT = 10**4


def fmt(x) -> str:
    return format(float(x), ".9g")


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    version: str = __version__
    wall_clock: str = field(
        default_factory=lambda: datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    )

    def comment_lines(self) -> list[str]:
        def flat(name, d):
            if not d:
                return [f"# manifest {name}="]
            items = " ".join(f"{k}={v}" for k, v in sorted(d.items()))
            return [f"# manifest {name} {items}"]

        lines = [f"# manifest command={self.command}", f"# manifest version={self.version}"]
        lines += flat("parameters", self.parameters)
        lines += flat("tolerances", self.tolerances)
        lines += flat("grid", self.grid)
        lines.append(f"# manifest wall_clock={self.wall_clock}")
        return lines

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": dict(sorted(self.parameters.items())),
            "tolerances": dict(sorted(self.tolerances.items())),
            "grid": dict(sorted(self.grid.items())),
            "version": self.version,
            "wall_clock": self.wall_clock,
        }


def emit_csv(manifest: RunManifest, header: list[str], rows: list[list[str]], out: str | None) -> str:
    lines = manifest.comment_lines() + [",".join(header)]
    lines += [",".join(row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def emit_json(manifest: RunManifest, payload: dict, out: str | None) -> str:
    doc = {"manifest": manifest.as_dict()}
    doc.update(payload)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _png_path(out: str) -> str:
    base, ext = os.path.splitext(out)
    return base + ".png" if ext else out + ".png"


def _figure(out: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def thread_count() -> int:
    raw = os.environ.get("QUDIT_MAGIC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_tables(args) -> int:
    manifest = RunManifest(
        command="tables",
        parameters={"dims": ",".join(map(str, DIMS)), "orders": ",".join(map(str, ORDERS))},
        tolerances={"threshold_tol": fmt(1e-12)},
    )
    cells = [(d, m) for d in DIMS for m in ORDERS if iteration_valid(d, m)]

    def one_threshold(cell):
        return cell, threshold_depolarizing(*cell)

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            thresholds = dict(pool.map(one_threshold, cells))
    else:
        thresholds = dict(map(one_threshold, cells))
    exponents = {cell: gamma_star(*cell) for cell in cells}

    def table_rows(values: dict) -> list[list[str]]:
        rows = []
        for d in DIMS:
            row = [str(d)]
            for m in ORDERS:
                row.append(fmt(values[(d, m)]) if (d, m) in values else "N/A")
            rows.append(row)
        return rows

    header = ["d"] + [f"m={m}" for m in ORDERS]
    if args.format == "json":
        payload = {
            "thresholds": {
                str(d): {str(m): (float(fmt(thresholds[(d, m)])) if (d, m) in thresholds else None) for m in ORDERS}
                for d in DIMS
            },
            "yield_exponents": {
                str(d): {str(m): (float(fmt(exponents[(d, m)])) if (d, m) in exponents else None) for m in ORDERS}
                for d in DIMS
            },
        }
        emit_json(manifest, payload, args.out)
        return 0
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        emit_csv(manifest, header, table_rows(thresholds), os.path.join(args.out, "table_thresholds.csv"))
        emit_csv(manifest, header, table_rows(exponents), os.path.join(args.out, "table_yield_exponents.csv"))
    else:
        sys.stdout.write("thresholds\n")
        emit_csv(manifest, header, table_rows(thresholds), None)
        sys.stdout.write("yield_exponents\n")
        emit_csv(manifest, header, table_rows(exponents), None)
    return 0


def cmd_verify(args) -> int:
    d, m = args.d, args.m
    checks: list[dict] = []

    def record(name, status, detail=""):
        checks.append({"name": name, "status": status, "detail": detail})

    code = None
    try:
        code = build_qrm(d, m)
        record("code_built", "pass", f"n={code.n} dim_x={code.lx.dim} dim_z={code.lz.dim}")
    except Exception as exc:
        record("code_built", "fail", str(exc))
    if code is not None:
        rep = validate_css(code)
        record("css_valid", "pass" if rep.ok else "fail", str(rep))
        try:
            dist = code_distance(code)
            expected = 3 if d == 2 else 2
            record(
                "distance",
                "pass" if dist == expected else "fail",
                f"measured={dist} expected={expected}",
            )
        except Exception as exc:
            record("distance", "fail", str(exc))

    gate = None
    if not gate_exists(d, m):
        status = "skipped" if d == 2 else "fail"
        record("gate_exists", status, "no member of the diagonal family at this (d, m)")
    else:
        gate = canonical_gate(d, m)
        record("gate_exists", "pass", f"lambda={','.join(map(str, gate.lambdas))}")
        rep = verify_membership(gate)
        record("gate_membership", "pass" if rep.member else "fail", f"clifford={rep.clifford}")
        if code is not None:
            ok, counter = verify_transversality(code, gate)
            record(
                "transversality_classical",
                "pass" if ok else "fail",
                "all cosets" if ok else f"counterexample={counter}",
            )
            size = d**code.n
            if size <= SIZE_LIMIT:
                defect = transversality_defect(code, gate)
                record(
                    "transversality_quantum",
                    "pass" if defect < 1e-10 else "fail",
                    f"defect={defect:.3e}",
                )
            else:
                record("transversality_quantum", "skipped", f"d^n={size} over dense limit")
            if size <= DENSE_CHECK_LIMIT:
                tri = trichotomy_check(code)
                ok = tri.max_deviation < 1e-10
                record(
                    "projector_trichotomy",
                    "pass" if ok else "fail",
                    f"detected={tri.detected} trivial={tri.trivial} "
                    f"undetected={tri.undetected} deviation={tri.max_deviation:.3e}",
                )
                rng = np.random.default_rng(20260819)
                noise = NoiseVector(d, tuple(float(x) for x in rng.dirichlet(np.ones(d))))
                sim = simulate_round(code, gate, noise)
                from .distill import iterate_general

                ref = iterate_general(code, noise)
                df = max(abs(a - float(b)) for a, b in zip(sim.noise.probs, ref.noise.probs))
                dp = abs(sim.success_probability - float(ref.success_probability))
                ok = df < 1e-9 and dp < 1e-9
                record("oracle_agreement", "pass" if ok else "fail", f"df={df:.3e} dP={dp:.3e}")
            else:
                record("projector_trichotomy", "skipped", f"d^n={size} over dense sweep limit")
                record("oracle_agreement", "skipped", f"d^n={size} over dense sweep limit")

    record(
        "protocol_valid",
        "pass" if iteration_valid(d, m) else "fail",
        "one logical qudit, distillation map defined"
        if iteration_valid(d, m)
        else "no distilling gate at this (d, m)",
    )
    overall = all(c["status"] != "fail" for c in checks)
    manifest = RunManifest(
        command="verify",
        parameters={"d": str(d), "m": str(m)},
        tolerances={"quantum_defect": fmt(1e-10), "oracle_agreement": fmt(1e-9)},
    )
    emit_json(manifest, {"checks": checks, "overall": "pass" if overall else "fail"}, args.out)
    return 0 if overall else 1


def cmd_iterate(args) -> int:
    d, m = args.d, args.m
    if not iteration_valid(d, m):
        sys.stderr.write(f"no distillation protocol at d={d} m={m}\n")
        return 1
    manifest = RunManifest(
        command="iterate",
        parameters={"d": str(d), "m": str(m), "eps": fmt(args.eps)},
        grid={"points": str(args.grid or 1)},
    )
    if args.grid:
        eps_values = [args.eps * i / (args.grid - 1) for i in range(args.grid)] if args.grid > 1 else [args.eps]
    else:
        eps_values = [args.eps]
    rows = []
    for eps in eps_values:
        eo, p = iterate_depolarizing(d, m, eps)
        rows.append([fmt(eps), fmt(eo), fmt(p)])
    header = ["eps", "eps_out", "success_probability"]
    if args.format == "json":
        payload = {
            "points": [
                {"eps": float(r[0]), "eps_out": float(r[1]), "success_probability": float(r[2])}
                for r in rows
            ]
        }
        emit_json(manifest, payload, args.out)
    else:
        emit_csv(manifest, header, rows, args.out)
        if args.out and args.grid:
            plt = _figure(args.out)
            xs = [float(r[0]) for r in rows]
            ys = [float(r[1]) for r in rows]
            fig, ax = plt.subplots(figsize=(5, 4))
            ax.plot(xs, ys, label="one round")
            ax.plot(xs, xs, linestyle="--", color="gray", label="identity")
            ax.set_xlabel("input error rate")
            ax.set_ylabel("output error rate")
            ax.set_title(f"depolarizing iteration d={d} m={m}")
            ax.legend()
            fig.tight_layout()
            fig.savefig(_png_path(args.out), dpi=130)
            plt.close(fig)
    return 0


def cmd_threshold(args) -> int:
    d, m = args.d, args.m
    if not iteration_valid(d, m):
        sys.stderr.write(f"no distillation protocol at d={d} m={m}\n")
        return 1
    tol = args.tol or 1e-12
    value = threshold_depolarizing(d, m, tol=tol)
    manifest = RunManifest(
        command="threshold",
        parameters={"d": str(d), "m": str(m)},
        tolerances={"tol": fmt(tol)},
    )
    if args.format == "json":
        emit_json(manifest, {"threshold": float(fmt(value))}, args.out)
    else:
        emit_csv(manifest, ["d", "m", "threshold"], [[str(d), str(m), fmt(value)]], args.out)
    return 0


def cmd_worst_case(args) -> int:
    d, m = args.d, args.m
    if not iteration_valid(d, m) or d == 2:
        sys.stderr.write(f"worst-case envelope needs an odd-prime protocol, got d={d} m={m}\n")
        return 1
    code = build_qrm(d, m)
    tol = args.tol or 1e-7
    thr = threshold_worst_case(code, tol=tol)
    const = 1.0 / thr
    floor = success_probability_floor(d, m)
    bounds = coarse_bounds(d, m)
    manifest = RunManifest(
        command="worst-case",
        parameters={"d": str(d), "m": str(m)},
        tolerances={"tol": fmt(tol)},
    )
    if args.format == "json":
        payload = {
            "threshold_worst_case": float(fmt(thr)),
            "quadratic_bound_constant": float(fmt(const)),
            "success_probability_floor": float(fmt(floor)),
            "coarse_eps_star": float(fmt(bounds.eps_star)),
        }
        emit_json(manifest, payload, args.out)
    else:
        header = [
            "d",
            "m",
            "threshold_worst_case",
            "quadratic_bound_constant",
            "success_probability_floor",
            "coarse_eps_star",
        ]
        rows = [[str(d), str(m), fmt(thr), fmt(const), fmt(floor), fmt(bounds.eps_star)]]
        emit_csv(manifest, header, rows, args.out)
    return 0


def _parse_targets(raw: str) -> list[float]:
    return [float(x) for x in raw.split(",") if x]


def cmd_yield(args) -> int:
    d, m = args.d, args.m
    if not iteration_valid(d, m):
        sys.stderr.write(f"no distillation protocol at d={d} m={m}\n")
        return 1
    targets = _parse_targets(args.eps_target)
    manifest = RunManifest(
        command="yield",
        parameters={"d": str(d), "m": str(m), "eps": fmt(args.eps), "eps_target": args.eps_target},
        grid={"points": str(args.grid or 1)},
    )
    if args.grid:
        eps_values = [args.eps * (i + 1) / args.grid for i in range(args.grid)]
        rows = []
        for target in targets:
            for eps in eps_values:
                res = yield_for_target(d, m, eps, target)
                rows.append([fmt(eps), fmt(target), str(res.rounds), fmt(res.yield_per_input)])
        header = ["eps_in", "eps_target", "rounds", "yield"]
        if args.format == "json":
            payload = {
                "grid": [
                    {
                        "eps_in": float(r[0]),
                        "eps_target": float(r[1]),
                        "rounds": int(r[2]),
                        "yield": float(r[3]),
                    }
                    for r in rows
                ]
            }
            emit_json(manifest, payload, args.out)
        else:
            emit_csv(manifest, header, rows, args.out)
            if args.out:
                plt = _figure(args.out)
                fig, ax = plt.subplots(figsize=(5, 4))
                for target in targets:
                    xs = [float(r[0]) for r in rows if float(r[1]) == target]
                    ys = [float(r[3]) for r in rows if float(r[1]) == target]
                    ax.semilogy(xs, ys, label=f"target {target:g}")
                ax.set_xlabel("input error rate")
                ax.set_ylabel("yield per input state")
                ax.set_title(f"distillation yield d={d} m={m}")
                ax.legend()
                fig.tight_layout()
                fig.savefig(_png_path(args.out), dpi=130)
                plt.close(fig)
        return 0
    res = yield_for_target(d, m, args.eps, targets[0])
    header = ["round", "eps", "success_probability"]
    rows = [["0", fmt(res.epsilons[0]), ""]]
    for i, p in enumerate(res.success_probabilities):
        rows.append([str(i + 1), fmt(res.epsilons[i + 1]), fmt(p)])
    if args.format == "json":
        payload = {
            "rounds": res.rounds,
            "yield": float(fmt(res.yield_per_input)),
            "epsilons": [float(fmt(e)) for e in res.epsilons],
            "success_probabilities": [float(fmt(p)) for p in res.success_probabilities],
        }
        emit_json(manifest, payload, args.out)
    else:
        emit_csv(manifest, header, rows, args.out)
    return 0


def cmd_region(args) -> int:
    if args.d != 3:
        sys.stderr.write("the attractor map is implemented for qutrits only (--d 3)\n")
        return 1
    resolution = args.grid or 80
    result = distillable_region_qutrit(resolution=resolution)
    manifest = RunManifest(
        command="region",
        parameters={"d": "3", "m": "2"},
        grid={"resolution": str(resolution)},
        tolerances={"settle": fmt(1e-7)},
    )
    rows = []
    for i, f1 in enumerate(result.axis):
        for j, f2 in enumerate(result.axis):
            cls = int(result.classes[i, j])
            if cls == -2:
                continue
            rows.append([fmt(1.0 - f1 - f2), fmt(f1), fmt(f2), str(cls)])
    header = ["f0", "f1", "f2", "attractor"]
    if args.format == "json":
        payload = {
            "resolution": resolution,
            "cells": [
                {"f0": float(r[0]), "f1": float(r[1]), "f2": float(r[2]), "attractor": int(r[3])}
                for r in rows
            ],
        }
        emit_json(manifest, payload, args.out)
    else:
        emit_csv(manifest, header, rows, args.out)
        if args.out:
            plt = _figure(args.out)
            grid = np.ma.masked_equal(result.classes, -2)
            fig, ax = plt.subplots(figsize=(5, 4.5))
            img = ax.imshow(
                grid.T,
                origin="lower",
                extent=(0, 1, 0, 1),
                interpolation="nearest",
                cmap="viridis",
                vmin=-1,
                vmax=2,
            )
            ax.set_xlabel("weight on first wrong state")
            ax.set_ylabel("weight on second wrong state")
            ax.set_title("qutrit attractor map")
            fig.colorbar(img, ax=ax, label="attractor index")
            fig.tight_layout()
            fig.savefig(_png_path(args.out), dpi=130)
            plt.close(fig)
    return 0


def cmd_inject(args) -> int:
    d = args.d
    m = args.m if args.m is not None else (2 if d == 3 else 1)
    try:
        gate = canonical_gate(d, m)
    except EmptySetError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    eps = args.eps if args.eps is not None else 0.05
    basis = magic_basis(gate)
    ideal = basis[:, 0]
    sigma_entries = (1 - eps) * np.outer(ideal, ideal.conj())
    for k in range(1, d):
        sigma_entries += eps / (d - 1) * np.outer(basis[:, k], basis[:, k].conj())
    sigma = DensityMatrix(sigma_entries)
    rng = np.random.default_rng(20260819)
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    rho = DensityMatrix.pure(psi)
    _, branches = inject(gate, sigma, rho, return_branches=True)
    deviation = injection_deviation(gate, sigma, rho)
    measured = resource_infidelity(gate, sigma)
    manifest = RunManifest(
        command="inject",
        parameters={"d": str(d), "m": str(m), "eps": fmt(eps)},
        tolerances={"bound_slack": fmt(1e-10)},
    )
    payload = {
        "resource_infidelity": float(fmt(measured)),
        "branch_probabilities": [float(fmt(b.probability)) for b in branches],
        "trace_norm_deviation": float(fmt(deviation)),
        "bound": float(fmt(2 * measured)),
        "within_bound": bool(deviation <= 2 * measured + 1e-10),
        "phase_angles": [float(fmt(t)) for t in phase_state_of(gate).theta],
    }
    emit_json(manifest, payload, args.out)
    return 0


def cmd_gate(args) -> int:
    d, m = args.d, args.m
    try:
        gate = canonical_gate(d, m)
    except EmptySetError as exc:
        sys.stderr.write(f"{exc}\n")
        return 1
    rep = verify_membership(gate)
    manifest = RunManifest(command="gate", parameters={"d": str(d), "m": str(m)})
    if args.format == "json":
        payload = {
            "lambdas": list(gate.lambdas),
            "modulus": gate.modulus,
            "special_unitary": rep.special_unitary,
            "second_level": rep.second_level,
            "clifford": rep.clifford,
            "member": rep.member,
            "recurrence_constant": rep.recurrence_constant,
            "serialized": gate.to_text(),
        }
        emit_json(manifest, payload, args.out)
    else:
        header = ["d", "m", "lambdas", "modulus", "special_unitary", "second_level", "clifford", "member"]
        rows = [
            [
                str(d),
                str(m),
                ";".join(map(str, gate.lambdas)),
                str(gate.modulus),
                str(rep.special_unitary),
                str(rep.second_level),
                str(rep.clifford),
                str(rep.member),
            ]
        ]
        emit_csv(manifest, header, rows, args.out)
    return 0


def cmd_code(args) -> int:
    d, m = args.d, args.m
    code = build_qrm(d, m)
    rep = validate_css(code)
    dist = code_distance(code)
    manifest = RunManifest(command="code", parameters={"d": str(d), "m": str(m)})
    if args.format == "json":
        payload = {
            "n": code.n,
            "dim_x": code.lx.dim,
            "dim_z": code.lz.dim,
            "distance": dist,
            "css_valid": rep.ok,
            "x_generators": [list(row) for row in code.lx.rows],
            "z_generators": [list(row) for row in code.lz.rows],
            "serialized": code.to_text(),
        }
        emit_json(manifest, payload, args.out)
    else:
        header = ["field", "value"]
        rows = [
            ["n", str(code.n)],
            ["dim_x", str(code.lx.dim)],
            ["dim_z", str(code.lz.dim)],
            ["distance", str(dist)],
            ["css_valid", str(rep.ok)],
        ]
        rows += [["x_generator", "".join(map(str, row))] for row in code.lx.rows]
        rows += [["z_generator", "".join(map(str, row))] for row in code.lz.rows]
        emit_csv(manifest, header, rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qudit-magic",
        description="exact analysis of qudit magic state distillation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_d=True, need_m=True, fmt_default="csv"):
        if need_d:
            p.add_argument("--d", type=int, required=True, help="prime qudit dimension")
        if need_m:
            p.add_argument("--m", type=int, required=True, help="code order")
        p.add_argument("--out", type=str, default=None, help="output path")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    p = sub.add_parser("tables", help="threshold and yield-exponent tables for all (d, m)")
    p.add_argument("--out", type=str, default=None, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("verify", help="build and check one code end to end")
    common(p, fmt_default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("iterate", help="one round of the depolarizing map")
    common(p)
    p.add_argument("--eps", type=float, required=True, help="input error rate (sweep max with --grid)")
    p.add_argument("--grid", type=int, default=None, help="sweep point count")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("threshold", help="depolarizing threshold of one protocol")
    common(p)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("worst-case", help="adversarial-noise threshold and bounds")
    common(p)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_worst_case)

    p = sub.add_parser("yield", help="rounds and yield to reach a target error rate")
    common(p)
    p.add_argument("--eps", type=float, required=True, help="input error rate (sweep max with --grid)")
    p.add_argument("--eps-target", type=str, required=True, help="target error rate(s), comma separated")
    p.add_argument("--grid", type=int, default=None, help="sweep point count for eps")
    p.set_defaults(func=cmd_yield)

    p = sub.add_parser("region", help="qutrit attractor map over the noise simplex")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--grid", type=int, default=None, help="cells per axis")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("inject", help="injection gadget demo with a noisy resource")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--eps", type=float, default=None, help="resource infidelity")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("gate", help="canonical gate and membership report")
    common(p)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("code", help="code summary and generator matrices")
    common(p)
    p.set_defaults(func=cmd_code)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
