"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 invalid configuration,
3 the oracle refused an enumeration over budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

from . import oracle as orc
from .entropy import landauer_delta
from .quantum import DensityMatrix, controlled_unitary_demo, quantum_invariant_suite, swap_erasure_demo
from .revmap import (
    ErasureSpec,
    SpecError,
    canonical_erasure_map,
    erasure_condition_holds,
    image_env_sets,
    record_width,
    save_map,
)
from .statespace import DomainError, PartitionError, decode_trits, load_partition, macrostate_of

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_REFUSED = 0, 1, 2, 3

ORACLE_FIELDS = [
    "M", "T", "N", "assignments", "min_union", "delta_nats", "delta_bits",
    "independent", "disjoint", "elapsed_ms",
]
VERIFY_FIELDS = [
    "M", "T", "N", "record_positions", "target", "erasure_condition", "branch_sizes",
    "union_size", "final_macro_size", "per_branch_delta_nats",
    "entropy_nats", "entropy_bits", "entropy_si_J_per_K", "bound_nats", "passed",
]
DEMO_FIELDS = [
    "name", "s_initial_nats", "s_system_final_nats", "s_env_final_nats",
    "delta_env_nats", "mutual_information_nats", "seed",
]


class ConfigError(ValueError):
    pass


def default_budget() -> int:
    raw = os.environ.get("ERASURE_LAB_BUDGET")
    if raw is None:
        return orc.DEFAULT_BUDGET
    try:
        return int(float(raw)) if "e" in raw.lower() else int(raw)
    except ValueError:
        raise ConfigError(f"ERASURE_LAB_BUDGET={raw!r} is not an integer") from None


@dataclass
class ExperimentConfig:
    M: int = 2
    T: int = 1
    N: int = 1
    record_positions: tuple[int, ...] | None = None
    target: int = 0
    budget: int = orc.DEFAULT_BUDGET
    tolerance: float = 1e-12
    quantum_tolerance: float = 1e-9
    out: str | None = None
    format: str = "text"
    seed: int = 0
    workers: int = 1
    timing: bool = False
    bit_distribution: tuple[float, float] = (0.5, 0.5)
    extra: dict = field(default_factory=dict)

    def spec(self) -> ErasureSpec:
        if self.M < 1:
            raise ConfigError(f"--system-dim must be >= 1, got {self.M}")
        if self.N < 1:
            raise ConfigError(f"--ensemble-size must be >= 1, got {self.N}")
        if self.T < record_width(self.M):
            raise ConfigError(
                f"M={self.M} needs a {record_width(self.M)}-trit record register; --trits {self.T} leaves no room"
            )
        if 3**self.T < (self.M + 1) * self.N:
            raise ConfigError(f"3**T = {3**self.T} < (M+1)*N = {(self.M + 1) * self.N}")
        try:
            return ErasureSpec.build(self.M, self.T, self.N, self.record_positions, self.target)
        except (SpecError, DomainError) as exc:
            raise ConfigError(str(exc)) from None


# -- formatting ---------------------------------------------------------------


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def render_rows(rows: list[dict], fields: list[str], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([_cell(r.get(f)) for f in fields])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([{f: r.get(f) for f in fields} for r in rows], indent=2) + "\n"
    raise ValueError(fmt)


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _trits(e: int, T: int) -> str:
    return "".join(map(str, decode_trits(e, T))) if T else "-"


# -- verify -------------------------------------------------------------------


def cmd_verify(cfg: ExperimentConfig) -> int:
    spec = cfg.spec()
    f = canonical_erasure_map(spec)
    check = erasure_condition_holds(f, spec)
    if not check.holds:
        emit(f"erasure condition fails at {check.witness}\n", cfg.out)
        return EXIT_FAIL
    images = image_env_sets(f, spec)
    branch_sizes = [len(b) for b in images.per_state]
    union = len(images.union)

    final_macro = union
    macro_ok = True
    partition_path = cfg.extra.get("partition")
    if partition_path:
        try:
            part = load_partition(partition_path, spec.T)
            spec.ensemble.check_against(part)
        except (OSError, PartitionError) as exc:
            raise ConfigError(str(exc)) from None
        labels = {macrostate_of(part, e) for e in images.union}
        macro_ok = len(labels) == 1
        if macro_ok:
            final_macro = len(part.class_of(labels.pop()))
    if cfg.extra.get("dump_map"):
        save_map(f, cfg.extra["dump_map"])

    delta = landauer_delta(spec.N, final_macro)
    bound = math.log(spec.M)
    per_branch = [landauer_delta(spec.N, b).nats for b in branch_sizes]
    passed = macro_ok and delta.nats >= bound - cfg.tolerance
    row = {
        "M": spec.M, "T": spec.T, "N": spec.N,
        "record_positions": list(spec.record_positions), "target": spec.target,
        "erasure_condition": check.holds, "branch_sizes": branch_sizes,
        "union_size": union, "final_macro_size": final_macro if macro_ok else None,
        "per_branch_delta_nats": per_branch,
        **delta.as_fields(), "bound_nats": bound, "passed": passed,
    }
    if cfg.format == "text":
        emit(_verify_text(spec, f, row, macro_ok), cfg.out)
    else:
        emit(render_rows([row], VERIFY_FIELDS, cfg.format), cfg.out)
    return EXIT_OK if passed else EXIT_FAIL


def _verify_text(spec, f, row, macro_ok) -> str:
    T = spec.T
    lines = [
        f"canonical erasure: M={spec.M} T={T} N={spec.N} "
        f"record trits {list(spec.record_positions)} target {spec.target}",
        f"initial ensemble: {[_trits(e, T) for e in spec.ensemble.sorted()]}",
    ]
    space = spec.space
    constrained = {space.flatten(js) for js in spec.constrained_domain()}
    if space.size <= 54:
        lines.append("")
        lines.append("mapping (* = fixed by the erasure condition):")
        for i in range(space.size):
            a, b = space.unflatten(i), space.unflatten(f(i))
            mark = "*" if i in constrained else " "
            lines.append(f" {mark} ({a.system}, {_trits(a.env, T)}) -> ({b.system}, {_trits(b.env, T)})")
    else:
        lines.append(f"joint space has {space.size} states; mapping table omitted")
    lines += [
        "",
        "entropy ledger (units of k):",
        f"  initial environment macrostate   N = {spec.N:<6d} S = {math.log(spec.N):.10f}",
        f"  per-branch image sizes            {row['branch_sizes']}  (delta {row['per_branch_delta_nats']})",
        f"  union of final environment states {row['union_size']}",
    ]
    if not macro_ok:
        lines.append("  final states straddle macrostates: the macrostate records the erased state")
    else:
        lines += [
            f"  final environment macrostate     F = {row['final_macro_size']:<6d} S = {math.log(row['final_macro_size']):.10f}",
            f"  delta_nats = {row['entropy_nats']!r}",
            f"  delta_bits = {row['entropy_bits']!r}",
            f"  delta_si   = {row['entropy_si_J_per_K']!r} J/K",
            f"  bound ln M = {row['bound_nats']!r}",
        ]
    lines.append(f"result: {'PASS' if row['passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


# -- oracle -------------------------------------------------------------------


def oracle_row(spec: ErasureSpec, cfg: ExperimentConfig) -> tuple[dict, bool]:
    t0 = time.perf_counter()
    result = orc.min_final_env_union(spec, cfg.budget, cfg.workers)
    ind = orc.verify_state_independence(spec, result=result)
    dis = orc.verify_disjointness(spec, result=result)
    elapsed = (time.perf_counter() - t0) * 1e3
    delta = result.delta
    row = {
        "M": spec.M, "T": spec.T, "N": spec.N,
        "assignments": result.maps_examined, "min_union": result.min_union,
        "delta_nats": delta.nats, "delta_bits": delta.bits,
        "independent": ind.ok, "disjoint": dis.ok,
        # Timing is opt-in so that default output is byte-reproducible.
        "elapsed_ms": round(elapsed, 3) if cfg.timing else None,
        "_result": result, "_ind": ind, "_dis": dis,
    }
    minimal = result.min_union == spec.M * spec.N and delta.nats >= math.log(spec.M) - cfg.tolerance
    return row, minimal and ind.ok and dis.ok


def cmd_oracle(cfg: ExperimentConfig) -> int:
    spec = cfg.spec()
    try:
        row, ok = oracle_row(spec, cfg)
    except orc.BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    if cfg.format == "text":
        r = row["_result"]
        lines = [
            f"oracle: M={spec.M} T={spec.T} N={spec.N} ensemble {spec.ensemble.sorted()}",
            f"  assignments examined  {r.maps_examined}",
            f"  minimum image union   {r.min_union} (witness {list(r.witness)})",
            f"  per-state image sizes {list(r.per_initial_state_sizes)}",
            f"  delta_nats            {row['delta_nats']!r}",
            f"  delta_bits            {row['delta_bits']!r}",
            f"  state independence    {row['independent']} ({row['_ind'].report['exceptions']} exceptions)",
            f"  disjointness          {row['disjoint']} "
            f"(admissible {row['_dis'].report['admissible']}, leaking {row['_dis'].report['leaking']}, "
            f"violations {row['_dis'].report['violations']})",
            f"result: {'PASS' if ok else 'FAIL'}",
        ]
        emit("\n".join(lines) + "\n", cfg.out)
    else:
        emit(render_rows([row], ORACLE_FIELDS, cfg.format), cfg.out)
    return EXIT_OK if ok else EXIT_FAIL


# -- quantum ------------------------------------------------------------------


def cmd_quantum(cfg: ExperimentConfig) -> int:
    p = cfg.bit_distribution
    try:
        rho = DensityMatrix.diag(p)
    except ValueError as exc:
        raise ConfigError(f"--bit-distribution {p}: {exc}") from None
    tol = cfg.quantum_tolerance
    swap = swap_erasure_demo(rho, seed=cfg.seed)
    ctrl = controlled_unitary_demo(p, seed=cfg.seed)
    suite = quantum_invariant_suite(cfg.seed, samples=cfg.extra.get("samples", 100))

    checks = {
        "swap_system_reset": swap.s_system_final_nats <= 1e-10 and swap.system_reset_error <= 1e-10,
        "swap_env_gain": abs(swap.delta_env_nats - swap.s_initial_nats) <= tol,
        "swap_conservation": abs(swap.s_total_after_nats - swap.s_total_before_nats) <= tol,
        "controlled_system_reset": ctrl.system_reset_error <= 1e-10,
        "controlled_record": abs(ctrl.mutual_information_nats - ctrl.s_initial_nats) <= tol,
        "invariants": suite.passed(tol),
    }
    ok = all(checks.values())
    demos = [swap.as_dict(), ctrl.as_dict()]
    if cfg.format == "json":
        doc = {
            "demos": [{k: d[k] for k in DEMO_FIELDS} for d in demos],
            "invariants": suite.as_dict(),
            "checks": checks,
        }
        emit(json.dumps(doc, indent=2) + "\n", cfg.out)
    elif cfg.format == "csv":
        emit(render_rows(demos, DEMO_FIELDS, "csv"), cfg.out)
    else:
        lines = [f"quantum checks, bit distribution {list(p)}, seed {cfg.seed}"]
        for d in demos:
            lines.append(f"  {d['name']}:")
            for k in DEMO_FIELDS[1:-1]:
                if d[k] is not None:
                    lines.append(f"    {k:<26s} {d[k]!r}")
        lines.append(
            f"  invariants over {suite.samples} samples, d in {list(suite.dims)}: "
            f"additivity {suite.max_additivity_error:.2e}, unitary {suite.max_unitary_invariance_error:.2e}, "
            f"partial trace {suite.max_partial_trace_error:.2e}"
        )
        lines += [f"  {name:<26s} {'ok' if v else 'FAIL'}" for name, v in checks.items()]
        lines.append(f"result: {'PASS' if ok else 'FAIL'}")
        emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK if ok else EXIT_FAIL


# -- sweep --------------------------------------------------------------------


def auto_trits(M: int, N: int) -> int:
    """Smallest T holding the record register plus N blank-register states."""
    T = record_width(M)
    while 3 ** (T - record_width(M)) < N:
        T += 1
    return T


def sweep_points(dims: list[int], trits: list[int] | None, sizes: list[int]) -> list[tuple[int, int, int]]:
    pts = []
    for M in dims:
        for N in sizes:
            for T in trits if trits is not None else [auto_trits(M, N)]:
                pts.append((M, T, N))
    return pts


def cmd_sweep(cfg: ExperimentConfig, points: list[tuple[int, int, int]]) -> int:
    specs = []
    for M, T, N in points:
        sub = ExperimentConfig(**{**cfg.__dict__, "M": M, "T": T, "N": N, "record_positions": None})
        specs.append(sub.spec())
    rows, skipped, ok = [], [], True
    for spec in specs:
        try:
            row, passed = oracle_row(spec, cfg)
        except orc.BudgetExceeded as exc:
            skipped.append(((spec.M, spec.T, spec.N), exc.required))
            continue
        rows.append(row)
        ok = ok and passed
    fmt = "csv" if cfg.format == "text" else cfg.format
    emit(render_rows(rows, ORACLE_FIELDS, fmt), cfg.out)
    if skipped:
        for (M, T, N), req in skipped:
            print(f"refused M={M} T={T} N={N}: needs {req} assignments, budget {cfg.budget}", file=sys.stderr)
        return EXIT_REFUSED
    return EXIT_OK if ok else EXIT_FAIL


# -- argument parsing -----------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _distribution(text: str) -> tuple[float, float]:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'p0,p1', got {text!r}") from None
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two probabilities, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system-dim", type=int, default=2, help="system dimension M")
    common.add_argument("--trits", type=int, default=1, help="environment trit count T")
    common.add_argument("--ensemble-size", type=int, default=1, help="initial macrostate size N")
    common.add_argument("--record-pos", type=_int_list, default=None, help="record trit positions, e.g. 0 or 0,1")
    common.add_argument("--target", type=int, default=0, help="reset state of the system")
    common.add_argument("--budget", type=int, default=None, help="oracle enumeration budget")
    common.add_argument("--tolerance", type=float, default=1e-12)
    common.add_argument("--quantum-tolerance", type=float, default=1e-9)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--out", default=None, help="write report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1, help="oracle worker processes")
    common.add_argument("--timing", action="store_true", help="fill elapsed_ms (breaks byte-reproducibility)")

    p = argparse.ArgumentParser(prog="erasure-lab", description="Finite-model checks of Landauer's erasure bound.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="build the canonical erasure map and report its entropy cost")
    v.add_argument("--partition", default=None, help="macrostate partition file for the environment")
    v.add_argument("--dump-map", default=None, help="write the full map in 'revmap' format")

    sub.add_parser("oracle", parents=[common], help="exhaustive minimality search over all erasure maps")

    q = sub.add_parser("quantum", parents=[common], help="density-matrix demos and invariants")
    q.add_argument("--bit-distribution", type=_distribution, default=(0.5, 0.5))
    q.add_argument("--samples", type=int, default=100)

    s = sub.add_parser("sweep", parents=[common], help="oracle rows over a grid of (M, T, N)")
    s.add_argument("--system-dims", type=_int_list, default=[1, 2, 3])
    s.add_argument("--trits-values", type=_int_list, default=None, help="default: smallest T that fits each point")
    s.add_argument("--ensemble-sizes", type=_int_list, default=[1])
    return p


def config_from_args(args) -> ExperimentConfig:
    cfg = ExperimentConfig(
        M=args.system_dim,
        T=args.trits,
        N=args.ensemble_size,
        record_positions=tuple(args.record_pos) if args.record_pos is not None else None,
        target=args.target,
        budget=args.budget if args.budget is not None else default_budget(),
        tolerance=args.tolerance,
        quantum_tolerance=args.quantum_tolerance,
        out=args.out,
        format=args.format,
        seed=args.seed,
        workers=args.workers,
        timing=args.timing,
    )
    if args.command == "verify":
        cfg.extra.update(partition=args.partition, dump_map=args.dump_map)
    if args.command == "quantum":
        cfg.bit_distribution = args.bit_distribution
        cfg.extra["samples"] = args.samples
    if cfg.workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {cfg.workers}")
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "oracle":
            return cmd_oracle(cfg)
        if args.command == "quantum":
            return cmd_quantum(cfg)
        points = sweep_points(args.system_dims, args.trits_values, args.ensemble_sizes)
        return cmd_sweep(cfg, points)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"erasure-lab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
