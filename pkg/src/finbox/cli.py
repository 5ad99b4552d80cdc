"""``finbox`` command line.

Exit codes: 0 holds / certified, 1 refuted / fails, 2 inconclusive or
heuristic failure, 64 usage or input error. Every run writes a manifest
(input hashes, seed, versions, outputs) so it can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

import finbox
from finbox import kernels
from finbox.conditions import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    WitnessMap,
    bounds,
    check_attractivity_sufficient,
    check_existence,
)
from finbox.heuristic import HeuristicConfig, HeuristicFailure, heuristic_witness_map
from finbox.model import Hyperbox, LawError, ModelError, NetworkModel, load_model, vertex_key
from finbox.sim import SimConfig, lyapunov_audit, monte_carlo, trajectory_svg
from finbox.synthesis import SynthesisError, export_lookup, load_lookup, synthesize_attractive, synthesize_invariant
from finbox.verify import CERTIFIED, REFUTED, hull_inclusion, scalar_minimal_box, verify_piecewise_law, vertex_necessity

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64

MANIFEST_NAME = "finbox-manifest.json"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Run:
    """Bookkeeping for the manifest."""

    def __init__(self, argv: Sequence[str], command: str):
        self.argv = list(argv)
        self.command = command
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.seed: int | None = None
        self.result: dict = {}

    def read(self, path: str | Path) -> str:
        p = _resolve(path)
        data = p.read_bytes()
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()
        return data.decode("utf-8")

    def write(self, path: str | Path, text: str) -> None:
        p = Path(path)
        if p.parent and not p.parent.exists():
            p.parent.mkdir(parents=True)
        p.write_text(text)
        self.outputs[str(p)] = hashlib.sha256(text.encode("utf-8")).hexdigest()

    def manifest(self, code: int) -> dict:
        return {
            "command": self.command,
            "argv": self.argv,
            "exit_code": code,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "seed": self.seed,
            "result": self.result,
            "environment": {
                "FINBOX_THREADS": os.environ.get("FINBOX_THREADS"),
                "FINBOX_PURE_PYTHON": os.environ.get("FINBOX_PURE_PYTHON"),
            },
            "versions": {
                "finbox": finbox.__version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "kernels": kernels.BACKEND,
            },
        }


def _resolve(path: str | Path) -> Path:
    """A real file, else a bundled model of that name (``example1.json``)."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("finbox") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise UsageError(f"no such file: {path}")


def _model(run: _Run, path: str) -> NetworkModel:
    return load_model(run.read(path))


def _parse_box(run: _Run, spec: str) -> Hyperbox:
    """``24,8`` (upper corners from 0), ``-5:5,0:8`` (ranges) or a JSON file."""
    if Path(spec).exists():
        doc = json.loads(run.read(spec))
        return Hyperbox.from_json(doc.get("box", doc))
    lower, upper = [], []
    try:
        for part in spec.split(","):
            if ":" in part:
                a, b = part.split(":")
                lo, hi = float(a), float(b)
            else:
                lo, hi = 0.0, float(part)
            if hi < lo:
                raise UsageError(f"box range {part!r} is empty")
            lower.append(lo)
            upper.append(hi - lo)
    except ValueError as exc:
        raise UsageError(f"cannot parse box {spec!r}") from exc
    return Hyperbox(tuple(upper), tuple(lower))


def _witnesses(model: NetworkModel, args, strict: bool, run: _Run) -> tuple[WitnessMap | None, dict]:
    """Witness map by exhaustive enumeration or the LP heuristic."""
    if args.mode == "lp":
        cfg = HeuristicConfig(epsilon=args.epsilon, selection=args.select)
        wm, _ = heuristic_witness_map(model, cfg)
        if not strict:
            wm = WitnessMap(wm.witnesses, False)
        return wm, {"condition": "(5)" if strict else "(4)", "holds": True, "mode": "lp"}
    verdict = (check_attractivity_sufficient if strict else check_existence)(model, args.cap)
    doc = verdict.to_json()
    doc["mode"] = "exhaustive"
    return verdict.witnesses, doc


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args, run: _Run) -> int:
    model = _model(run, args.model)
    wm, doc = _witnesses(model, args, args.strict, run)
    run.result = doc
    name = doc["condition"]
    if wm is None:
        print(f"condition {name} fails; empty at vertices: {' '.join(doc['failing'])}")
        return EXIT_REFUTED
    print(f"condition {name} holds ({len(wm.witnesses)} witnesses, mode {doc['mode']})")
    for z, u in wm.items():
        print(f"  {vertex_key(z)} -> {list(u)}")
    b = bounds(model, wm)
    run.result["bounds"] = b.to_json()
    box = " x ".join(f"[0,{v:g}]" for v in b.box.upper)
    print(f"box {box}" + (f", Delta={b.Delta}" if b.Delta is not None else ""))
    return EXIT_OK


def cmd_synthesize(args, run: _Run) -> int:
    model = _model(run, args.model)
    wm, doc = _witnesses(model, args, args.strict, run)
    run.result = doc
    if wm is None:
        print(f"condition {doc['condition']} fails at {' '.join(doc['failing'])}; nothing to synthesize")
        return EXIT_REFUTED
    if args.strict:
        law, box, delta = synthesize_attractive(model, wm)
    else:
        L = None if args.L is None else tuple(float(v) for v in args.L.split(","))
        law, box = synthesize_invariant(model, wm, L)
        delta = None
    text = export_lookup(law, box, delta) + "\n"
    if args.out:
        run.write(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    run.result.update({"box": box.to_json(), "delta": delta})
    return EXIT_OK


def cmd_verify(args, run: _Run) -> int:
    model = _model(run, args.model)
    law, law_box, _ = load_lookup(run.read(args.law))
    if args.box is not None:
        box = _parse_box(run, args.box)
    elif law_box is not None:
        box = law_box
    else:
        raise UsageError("no box given and the law file carries none")
    law.check_against(model)
    nec = vertex_necessity(model, box, law)
    exact = verify_piecewise_law(model, box, law)
    run.result = {"vertex_necessity": nec.to_json(), "piecewise": exact.to_json()}
    for label, v in (("vertex necessity", nec), ("piecewise verification", exact)):
        print(f"{label}: {v.status}" + (f" ({v.message})" if v.message else ""))
        if v.witness is not None:
            print(f"  witness: {json.dumps(v.witness)}")
    if nec.status == REFUTED or exact.status == REFUTED:
        return EXIT_REFUTED
    if exact.status == CERTIFIED:
        return EXIT_OK
    return EXIT_INCONCLUSIVE


def cmd_minbox(args, run: _Run) -> int:
    model = _model(run, args.model)
    if model.n != 1:
        raise UsageError(f"minbox needs a scalar model (n = 1), got n = {model.n}")
    if not check_existence(model, args.cap).holds:
        print("existence condition fails: no invariant interval exists")
        run.result = {"K": None}
        return EXIT_REFUTED
    res = scalar_minimal_box(model, args.cap)
    if res is None:
        print("no invariant interval found up to the constructive bound")
        return EXIT_INCONCLUSIVE
    print(f"K={res.K}")
    run.result = {"K": res.K}
    if res.below is not None:
        gap = res.below.gap
        print(f"K={res.K - 1} fails: the open gap ({gap[0]:g}, {gap[1]:g}) of [0,{res.K - 1}] is uncovered")
        run.result["gap_below"] = list(gap)
    if args.out:
        run.write(args.out, export_lookup(res.law, res.box) + "\n")
    return EXIT_OK


def cmd_hull(args, run: _Run) -> int:
    model = _model(run, args.model)
    v = hull_inclusion(model, strict_interior=args.strict, cap=args.cap)
    run.result = v.to_json()
    print(f"hull inclusion{' (interior)' if args.strict else ''}: {v.status}: {v.message}")
    if v.witness is not None:
        print(f"  witness: {json.dumps(v.witness)}")
    return {CERTIFIED: EXIT_OK, REFUTED: EXIT_REFUTED}.get(v.status, EXIT_INCONCLUSIVE)


def cmd_simulate(args, run: _Run) -> int:
    model = _model(run, args.model)
    law, law_box, delta = load_lookup(run.read(args.law))
    box = _parse_box(run, args.box) if args.box else law_box
    if box is None:
        raise UsageError("no --box given and the law file carries none")
    law.check_against(model)
    run.seed = args.seed
    if args.init:
        try:
            lo, hi = (float(v) for v in args.init.split(","))
        except ValueError as exc:
            raise UsageError(f"--init expects lo,hi, got {args.init!r}") from exc
        cfg = SimConfig(args.paths, args.horizon, args.seed, lo, hi)
    else:
        cfg = SimConfig.around_box(box, args.seed, args.init_margin, paths=args.paths, horizon=args.horizon)
    report = monte_carlo(model, law, box, cfg)
    out = Path(args.out_dir)
    doc = report.to_json()
    doc["config"] = {
        "paths": cfg.paths,
        "horizon": cfg.horizon,
        "seed": cfg.seed,
        "init_low": list(cfg.bounds_for(model.n)[0]),
        "init_high": list(cfg.bounds_for(model.n)[1]),
    }
    audit_ok = True
    if delta is not None and law.kind == "threshold":
        audits = [lyapunov_audit(t, box, delta) for t in report.trajectories]
        bad = [k for k, a in enumerate(audits) if a.status != CERTIFIED]
        doc["lyapunov_audit"] = {"delta": delta, "failed_paths": bad}
        audit_ok = not bad
    for k, traj in enumerate(report.trajectories):
        run.write(out / f"path_{k:04d}.csv", traj.to_csv())
    run.write(out / "summary.json", json.dumps(doc, indent=2) + "\n")
    if args.svg:
        run.write(args.svg, trajectory_svg(report.trajectories[0], box))
    entered = sum(p.entry_time is not None for p in report.paths)
    print(f"{entered}/{cfg.paths} paths entered the box; post-entry violations: {report.total_violations}")
    if "lyapunov_audit" in doc:
        print(f"Lyapunov audit (Delta={delta}): {'certified' if audit_ok else 'refuted'}")
    run.result = {k: doc[k] for k in ("all_entered", "post_entry_violations", "min_decrement")}
    if report.total_violations or not audit_ok:
        return EXIT_REFUTED
    return EXIT_OK if report.all_entered else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------


def _add_mode(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strict", action="store_true", help="use the strict sets (attractivity)")
    p.add_argument("--mode", choices=("exhaustive", "lp"), default="exhaustive")
    p.add_argument("--epsilon", type=float, default=1.0, help="LP margin floor (lp mode)")
    p.add_argument("--select", choices=("vertex", "center"), default="vertex", help="LP point selection (lp mode)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="finbox", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"finbox {finbox.__version__}")
    parser.add_argument("--manifest", help=f"manifest path (default ./{MANIFEST_NAME}, or inside --out-dir)")
    parser.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP, help="enumeration cap on |U|^m")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="decide the existence / attractivity conditions")
    p.add_argument("model")
    _add_mode(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synthesize", help="build a threshold law and its box")
    p.add_argument("model")
    _add_mode(p)
    p.add_argument("--L", help="thresholds L_1,...,L_n (invariant law only; default L^o)")
    p.add_argument("--out", help="law JSON path (default stdout)")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="exactly verify a law on a box")
    p.add_argument("model")
    p.add_argument("law")
    p.add_argument("box", nargs="?", help="'24,8', '-5:5,0:8' or a JSON file; default: the law's box")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("minbox", help="smallest invariant interval [0,K] of a scalar model")
    p.add_argument("model")
    p.add_argument("--out", help="write the covering law")
    p.set_defaults(func=cmd_minbox)

    p = sub.add_parser("hull", help="convex-hull inclusion diagnostics")
    p.add_argument("model")
    p.add_argument("--strict", action="store_true", help="interior inclusion")
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("simulate", help="seeded closed-loop Monte Carlo")
    p.add_argument("model")
    p.add_argument("law")
    p.add_argument("--box", help="as for verify; default: the law's box")
    p.add_argument("--paths", type=int, default=30)
    p.add_argument("--horizon", type=int, default=600)
    p.add_argument("--seed", type=int, default=0)
    init = p.add_mutually_exclusive_group()
    init.add_argument("--init", help="lo,hi for every axis")
    init.add_argument("--init-margin", type=float, default=1000.0, help="sample from [lo_i - M, hi_i + M]")
    p.add_argument("--svg", help="plot of the first path")
    p.add_argument("--out-dir", default="finbox-sim")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = _Run(argv, args.command)
    try:
        code = args.func(args, run)
    except UsageError as exc:
        print(f"finbox {args.command}: error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except HeuristicFailure as exc:
        print(f"finbox {args.command}: heuristic: {exc}", file=sys.stderr)
        run.result = {"heuristic_failure": {"vertex": vertex_key(exc.z), "stage": exc.stage}}
        code = EXIT_INCONCLUSIVE
    except EnumerationCapError as exc:
        print(f"finbox {args.command}: conditions: {exc}", file=sys.stderr)
        code = EXIT_INCONCLUSIVE
    except (ModelError, LawError, SynthesisError, ValueError) as exc:
        module = type(exc).__module__.rsplit(".", 1)[-1]
        print(f"finbox {args.command}: {module}: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    if args.manifest:
        path = Path(args.manifest)
    elif args.command == "simulate":
        path = Path(args.out_dir) / MANIFEST_NAME
    else:
        path = Path(MANIFEST_NAME)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(run.manifest(code), indent=2, default=str) + "\n")
    except OSError as exc:
        print(f"finbox: could not write manifest {path}: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
