"""Command-line interface: verify sweeps, figure CSVs, model tables.

Exit codes are a stable contract: 0 success / no violations, 1 sweep
violations found, 2 fixture or validation or I/O failure, 64 usage
error (bad flags, bad parameter ranges, unknown names).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .bounds import collapse_general_bound
from .channels import Instrument, choi_check
from .figures import DEFAULT_POINTS, FIGURE_IDS, figure_spec, write_figure_csv
from .metrics import (
    CoherencePair,
    DisturbanceConfig,
    delta_disturbance,
    delta_infidelity,
    residual_coherence,
    sigma2,
)
from .models import (
    SharpnessFamily,
    beamsplitter_model,
    fluorescence_delta_bound,
    fluorescence_disturbance,
    fluorescence_model,
    von_neumann_instrument,
)
from .operators import PAULI_Z, HermitianOperator
from .sweep import SweepConfig, manifest_json, run_sweep, violations

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INVALID = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here says 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _usage_error(message: str) -> int:
    print(f"qchan: error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _build_parser() -> _Parser:
    parser = _Parser(prog="qchan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_verify = sub.add_parser("verify", help="run the randomized falsification sweep")
    p_verify.add_argument("--trials", type=int, default=100)
    p_verify.add_argument("--dim", type=int, default=2)
    p_verify.add_argument("--outcomes", type=int, default=4,
                          help="maximum outcomes per instrument")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--report", default=None, help="write the manifest here")
    p_verify.add_argument("--format", choices=("json", "csv"), default="json")
    p_verify.add_argument("--fixture", default=None,
                          help="validate this channel file before sweeping")

    p_fig = sub.add_parser("figure", help="emit one figure curve as CSV")
    p_fig.add_argument("id", type=int)
    p_fig.add_argument("--out", default=None)
    p_fig.add_argument("--points", type=int, default=DEFAULT_POINTS)

    p_model = sub.add_parser("model", help="evaluate a named reference model")
    p_model.add_argument(
        "name", choices=("von-neumann", "sharpness", "beamsplitter", "fluorescence")
    )
    p_model.add_argument("--p", type=float, default=None)
    p_model.add_argument("--theta", type=float, default=math.pi / 4.0)
    p_model.add_argument("--fock-dim", type=int, default=40)
    p_model.add_argument("--safe-dim", type=int, default=None)
    p_model.add_argument("--omega", type=float, default=None)
    p_model.add_argument("--tmax", type=float, default=5.0)
    p_model.add_argument("--steps", type=int, default=101)
    p_model.add_argument("--out", default=None)
    return parser


def _load_fixture(path: str):
    """Return (apply_dual, dim) for either wire format.

    Superoperator files hold the full matrix in column-stacking
    convention; instrument files are the standard instrument JSON and
    get revalidated on load.
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("kind") == "superoperator":
        dim = int(data["dim"])
        m = np.array(
            [[complex(re, im) for re, im in row] for row in data["matrix"]],
            dtype=complex,
        )
        if m.shape != (dim * dim, dim * dim):
            raise ValueError(f"superoperator matrix must be {dim*dim}x{dim*dim}")

        def apply_dual(rho: np.ndarray) -> np.ndarray:
            return (m @ rho.reshape(-1, order="F")).reshape(dim, dim, order="F")

        return apply_dual, dim
    inst = Instrument.from_json_dict(data)
    return inst, inst.dim


def _cmd_verify(args) -> int:
    if args.trials < 1:
        return _usage_error("--trials must be at least 1")
    if args.dim < 2:
        return _usage_error("--dim must be at least 2")
    if args.outcomes < args.dim:
        return _usage_error("--outcomes must be at least --dim")

    if args.fixture is not None:
        try:
            channel, dim = _load_fixture(args.fixture)
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            print(f"fixture rejected: {exc}", file=sys.stderr)
            return EXIT_INVALID
        report = choi_check(channel, dim=dim)
        print(
            f"fixture complete-positivity: min eigenvalue "
            f"{_fmt(report.min_eigenvalue)} -> "
            f"{'ok' if report.passed else 'FAIL'}"
        )
        if not report.passed:
            print("fixture rejected: not completely positive", file=sys.stderr)
            return EXIT_INVALID

    cfg = SweepConfig(
        master_seed=args.seed,
        trials=args.trials,
        dim=args.dim,
        max_outcomes=args.outcomes,
    )
    manifest = run_sweep(cfg)

    counts: dict[str, list[int]] = {}
    for r in manifest["results"]:
        c = counts.setdefault(r["id"], [0, 0])
        c[1] += 1
        if r["pass"]:
            c[0] += 1
    for name in sorted(counts):
        ok, total = counts[name]
        print(f"{name}: {ok}/{total} pass")
    bad = violations(manifest)
    print(f"violations: {len(bad)}")
    cap_errors = manifest["aux"].get("enumeration_cap_errors", 0)
    if cap_errors:
        print(f"enumeration-cap errors: {cap_errors} (trials skipped)")

    if args.report is not None:
        try:
            with open(args.report, "w", encoding="ascii", newline="\n") as fh:
                if args.format == "json":
                    fh.write(manifest_json(manifest) + "\n")
                else:
                    fh.write("id,trial,lhs,rhs,slack,pass,estimated,note\n")
                    for r in manifest["results"]:
                        fh.write(
                            ",".join(
                                (
                                    r["id"],
                                    str(r["inputs"].get("trial", "")),
                                    _fmt(r["lhs"]),
                                    _fmt(r["rhs"]),
                                    _fmt(r["slack"]),
                                    "true" if r["pass"] else "false",
                                    "true" if r["estimated"] else "false",
                                    str(r["inputs"].get("note", "")).replace(",", ";"),
                                )
                            )
                            + "\n"
                        )
        except OSError as exc:
            print(f"cannot write report: {exc}", file=sys.stderr)
            return EXIT_INVALID
    return EXIT_VIOLATIONS if bad else EXIT_OK


def _cmd_figure(args) -> int:
    try:
        spec = figure_spec(args.id, args.points)
    except ValueError as exc:
        return _usage_error(str(exc))
    out = args.out if args.out is not None else f"figure{args.id}.csv"
    try:
        write_figure_csv(spec, out)
    except OSError as exc:
        print(f"cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"wrote {out} ({len(spec.rows)} rows)")
    return EXIT_OK


def _print_table(rows: list[tuple[str, float]], out_path) -> int:
    text = "\n".join(f"{k} = {_fmt(v)}" for k, v in rows) + "\n"
    if out_path is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(out_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("quantity,value\n")
            for k, v in rows:
                fh.write(f"{k},{_fmt(v)}\n")
    except OSError as exc:
        print(f"cannot write {out_path}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def _cmd_model(args) -> int:
    if args.name == "von-neumann":
        inst = von_neumann_instrument()
        z = HermitianOperator(PAULI_Z)
        est = delta_disturbance(inst, DisturbanceConfig(seed=0))
        pair = CoherencePair.from_extremes(z)
        rows = [
            ("delta", delta_infidelity(inst, z)),
            ("Delta", est.value),
            ("Sigma2", sigma2(inst, inst.pointer())),
            ("coherence", residual_coherence(inst, pair)),
        ]
        return _print_table(rows, args.out)

    if args.name == "sharpness":
        if args.p is None:
            return _usage_error("model sharpness requires --p")
        try:
            fam = SharpnessFamily(args.p)
        except ValueError as exc:
            return _usage_error(str(exc))
        inst = fam.instrument()
        z = HermitianOperator(PAULI_Z)
        delta = delta_infidelity(inst, z)
        est = delta_disturbance(inst, DisturbanceConfig(seed=0))
        pair = CoherencePair.from_extremes(z)
        coherence = residual_coherence(inst, pair)
        circle = (0.5 - delta) ** 2 + (0.5 - fam.disturbance) ** 2 - 0.25
        rows = [
            ("p", fam.p),
            ("delta", delta),
            ("Delta", est.value),
            ("Sigma2", fam.sigma2),
            ("coherence", coherence),
            ("damping", fam.damping_factor),
            ("collapse_bound", collapse_general_bound(delta)),
            ("circle_residual", circle),
            ("collapse_residual", collapse_general_bound(delta) - coherence),
        ]
        return _print_table(rows, args.out)

    if args.name == "beamsplitter":
        try:
            model = beamsplitter_model(args.theta, args.fock_dim, args.safe_dim)
        except ValueError as exc:
            return _usage_error(str(exc))
        eb, ebt = model.unbiasedness_error()
        product = model.sigma_b() * model.sigma_bt()
        rows = [
            ("theta", args.theta),
            ("sigma_b", model.sigma_b()),
            ("sigma_bt", model.sigma_bt()),
            ("sigma_product", product),
            ("commutator_half_norm", model.commutator_half_norm()),
            ("jm_residual", product - model.commutator_half_norm()),
            ("transfer_error_b", eb),
            ("transfer_error_bt", ebt),
            ("edge_error", model.edge_error()),
        ]
        return _print_table(rows, args.out)

    # fluorescence: a (t, disturbance, readout floor) trajectory table
    if args.omega is None:
        return _usage_error("model fluorescence requires --omega")
    try:
        fluorescence_model(args.omega)
    except ValueError as exc:
        return _usage_error(str(exc))
    if args.tmax <= 0.0 or args.steps < 2:
        return _usage_error("--tmax must be positive and --steps at least 2")
    lines = ["t,Delta,delta_floor"]
    for t in np.linspace(0.0, args.tmax, args.steps):
        t = float(t)
        lines.append(
            f"{_fmt(t)},{_fmt(fluorescence_disturbance(t))},"
            f"{_fmt(fluorescence_delta_bound(t))}"
        )
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "figure":
        return _cmd_figure(args)
    return _cmd_model(args)


if __name__ == "__main__":
    sys.exit(main())
