"""Command line interface.

Subcommands:
    coeffs   print the rate coefficients for one parameter point
    evolve   write a trajectory CSV (state, concurrence, negativity vs time)
    map      write sweep grids: `map time-sep` or `map temp-sep`
    verify   run the built-in verification suites

All quantities on the CLI are dimensionless: --mass-ratio is m/omega,
--temp-ratio is T/omega, --sep is omega*L, and times are Gamma0*tau.
Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import MassbathError, NotAStateError, SweepCellError
from .field_bath import FieldBathConfig, coefficients, gray_factor, spatial_factor
from .measures import (
    CONCURRENCE_CUTOFF,
    NEGATIVITY_CUTOFF,
    concurrence,
    negativity,
)
from .experiments import (
    GridAxis,
    SweepConfig,
    evolve_scan,
    run_verification,
    thermal_scan,
)
from .xstate import (
    LAMBDA_SINGULAR_BAND,
    XState,
    build_rate_matrix,
    closed_form_trajectory,
    eigen_trajectory,
)

EVOLVE_HEADER = (
    "tau,rho_G,rho_A,rho_S,rho_E,re_GE,im_GE,re_AS,im_AS,concurrence,negativity"
)
MAP_HEADER = "axis1,axis2,concurrence,negativity,method"

_NAMED_STATES = {
    "E": XState.excited,
    "G": XState.ground,
    "A": XState.antisymmetric,
    "S": XState.symmetric,
    "bell-GE": XState.bell_ge,
}


def _fmt(value: float) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(value))


def parse_initial(text: str) -> XState:
    """Parse --initial: a named state, diag:e,g,a,s, or 8 raw values.

    Raw values follow the trajectory CSV column order:
    rho_G, rho_A, rho_S, rho_E, re_GE, im_GE, re_AS, im_AS.
    """
    try:
        if text in _NAMED_STATES:
            return _NAMED_STATES[text]()
        if text.startswith("diag:"):
            parts = [float(p) for p in text[5:].split(",")]
            if len(parts) != 4:
                raise ValueError("diag: takes exactly 4 values e,g,a,s")
            return XState.diagonal(*parts)
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 8:
            raise ValueError(
                "expected a named state, diag:e,g,a,s, or 8 comma-separated values"
            )
        return XState(
            pop_g=parts[0],
            pop_a=parts[1],
            pop_s=parts[2],
            pop_e=parts[3],
            coh_ge=complex(parts[4], parts[5]),
            coh_as=complex(parts[6], parts[7]),
        )
    except NotAStateError as exc:
        raise ValueError(f"--initial does not describe a state: {exc}") from exc
    except ValueError as exc:
        raise ValueError(f"invalid --initial {text!r}: {exc}") from exc


def _load_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {line!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def _merge_config(argv: list[str]) -> list[str]:
    """Append flags from the --config file for keys not already on the line."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return argv
    merged = list(argv)
    for key, value in _load_config_file(path).items():
        flag = f"--{key}"
        present = any(tok == flag or tok.startswith(flag + "=") for tok in argv)
        if not present:
            merged.extend([flag, value])
    return merged


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = datetime.datetime.fromtimestamp(int(epoch), datetime.timezone.utc)
    else:
        moment = datetime.datetime.now(datetime.timezone.utc)
    return moment.isoformat()


def _write_manifest(command: str, params: dict, outputs: list[Path]) -> Path:
    records = []
    for path in outputs:
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        records.append({"path": path.name, "sha256": digest})
    manifest = {
        "command": command,
        "params": params,
        "version": __version__,
        "timestamp": _timestamp(),
        "outputs": records,
    }
    manifest_path = outputs[0].with_name(outputs[0].name + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest_path


def _emit(text: str, out: str | None) -> list[Path]:
    if out is None:
        sys.stdout.write(text)
        return []
    path = Path(out)
    path.write_text(text, newline="\n")
    return [path]


def cmd_coeffs(args) -> int:
    config = FieldBathConfig.from_ratios(args.mass_ratio, args.sep, args.temp_ratio)
    gray = gray_factor(config.mass, config.omega)
    lam = spatial_factor(config.omega, config.separation, gray)
    coeffs = coefficients(config)
    g0 = config.gamma0
    rows = [
        ("gray_factor", gray),
        ("spatial_factor", lam),
        ("a1", coeffs.a1 / g0),
        ("b1", coeffs.b1 / g0),
        ("a2", coeffs.a2 / g0),
        ("b2", coeffs.b2 / g0),
    ]
    for name, value in rows:
        print(f"{name:<16}{value:.12g}")
    return 0


def cmd_evolve(args) -> int:
    initial = parse_initial(args.initial)
    config = FieldBathConfig.from_ratios(args.mass_ratio, args.sep, args.temp_ratio)
    coeffs = coefficients(config)
    gray = gray_factor(config.mass, config.omega)
    lam = spatial_factor(config.omega, config.separation, gray)
    taus = np.linspace(0.0, args.tmax, args.steps)
    if (
        not config.is_thermal
        and not coeffs.is_frozen
        and abs(lam) <= 1.0 - LAMBDA_SINGULAR_BAND
    ):
        trajectory = closed_form_trajectory(initial, lam, gray, config.gamma0, taus)
    else:
        trajectory = eigen_trajectory(initial, build_rate_matrix(coeffs), taus)
    lines = [EVOLVE_HEADER]
    for tau, state in trajectory:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    tau,
                    state.pop_g,
                    state.pop_a,
                    state.pop_s,
                    state.pop_e,
                    state.coh_ge.real,
                    state.coh_ge.imag,
                    state.coh_as.real,
                    state.coh_as.imag,
                    concurrence(state),
                    negativity(state),
                )
            )
        )
    outputs = _emit("\n".join(lines) + "\n", args.out)
    if outputs:
        params = {
            "initial": args.initial,
            "mass-ratio": args.mass_ratio,
            "sep": args.sep,
            "temp-ratio": args.temp_ratio,
            "tmax": args.tmax,
            "steps": args.steps,
            "measure": args.measure,
            "method": trajectory.method,
        }
        _write_manifest("evolve", params, outputs)
    return 0


def _axis_from_args(args, prefix: str) -> GridAxis:
    return GridAxis(
        start=getattr(args, f"{prefix}_min"),
        stop=getattr(args, f"{prefix}_max"),
        count=getattr(args, f"{prefix}_count"),
        scale=getattr(args, f"{prefix}_scale"),
    )


def _write_map(result, command: str, params: dict, out: str) -> int:
    lines = [MAP_HEADER]
    for i, v1 in enumerate(result.axis1):
        for j, v2 in enumerate(result.axis2):
            lines.append(
                ",".join(
                    (
                        _fmt(v1),
                        _fmt(v2),
                        _fmt(result.concurrence[i, j]),
                        _fmt(result.negativity[i, j]),
                        str(result.method[i, j]),
                    )
                )
            )
    outputs = _emit("\n".join(lines) + "\n", out)
    if outputs:
        _write_manifest(command, params, outputs)
    return 0


def cmd_map_time_sep(args) -> int:
    initial = parse_initial(args.initial)
    config = SweepConfig(
        mass_ratio=args.mass_ratio,
        initial=initial,
        sep_axis=_axis_from_args(args, "sep"),
        tau_axis=_axis_from_args(args, "tau"),
        temp_ratio=args.temp_ratio,
        reduction="instantaneous",
    )
    try:
        result = evolve_scan(config)
    except SweepCellError as exc:
        print(f"sweep cell failed: {exc}", file=sys.stderr)
        return 3
    params = {
        "initial": args.initial,
        "mass-ratio": args.mass_ratio,
        "temp-ratio": args.temp_ratio,
        "axis1": "tau",
        "axis2": "sep",
        "cutoff-c": args.cutoff_c,
        "cutoff-n": args.cutoff_n,
    }
    return _write_map(result, "map time-sep", params, args.out)


def cmd_map_temp_sep(args) -> int:
    initial = parse_initial(args.initial)
    config = SweepConfig(
        mass_ratio=args.mass_ratio,
        initial=initial,
        sep_axis=_axis_from_args(args, "sep"),
        temp_axis=_axis_from_args(args, "temp"),
        reduction="max_over_time",
    )
    try:
        result = thermal_scan(config)
    except SweepCellError as exc:
        print(f"sweep cell failed: {exc}", file=sys.stderr)
        return 3
    params = {
        "initial": args.initial,
        "mass-ratio": args.mass_ratio,
        "axis1": "temp-ratio",
        "axis2": "sep",
        "cutoff-c": args.cutoff_c,
        "cutoff-n": args.cutoff_n,
    }
    return _write_map(result, "map temp-sep", params, args.out)


def cmd_verify(args) -> int:
    results = run_verification(seed=args.seed, perturb=args.perturb)
    failed = False
    for suite in results:
        status = "PASS" if suite.passed else "FAIL"
        print(
            f"{suite.name:<20} max deviation {suite.max_deviation:.3e} "
            f"(threshold {suite.threshold:.0e}) {status}"
        )
        failed = failed or not suite.passed
    return 1 if failed else 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        help="flat key=value file whose keys mirror flag names; flags override",
    )


def _add_axis(parser, prefix: str, lo: float, hi: float, count: int) -> None:
    parser.add_argument(f"--{prefix}-min", type=float, default=lo)
    parser.add_argument(f"--{prefix}-max", type=float, default=hi)
    parser.add_argument(f"--{prefix}-count", type=int, default=count)
    parser.add_argument(
        f"--{prefix}-scale", choices=("linear", "log"), default="linear"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="massbath",
        description="Entanglement dynamics of two qubits in a massive scalar bath.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    coeffs = sub.add_parser("coeffs", help="print rate coefficients (units of Gamma0)")
    _add_common(coeffs)
    coeffs.add_argument("--mass-ratio", type=float, required=True)
    coeffs.add_argument("--sep", type=float, required=True)
    coeffs.add_argument("--temp-ratio", type=float, default=None)
    coeffs.set_defaults(func=cmd_coeffs)

    evolve = sub.add_parser("evolve", help="trajectory CSV for one parameter point")
    _add_common(evolve)
    evolve.add_argument(
        "--initial",
        required=True,
        help="E, G, A, S, bell-GE, diag:e,g,a,s, or 8 raw values "
        "(rho_G,rho_A,rho_S,rho_E,re_GE,im_GE,re_AS,im_AS)",
    )
    evolve.add_argument("--mass-ratio", type=float, required=True)
    evolve.add_argument("--sep", type=float, default=0.0)
    evolve.add_argument("--temp-ratio", type=float, default=None)
    evolve.add_argument("--tmax", type=float, default=10.0)
    evolve.add_argument("--steps", type=int, default=200)
    evolve.add_argument(
        "--measure",
        choices=("concurrence", "negativity", "both"),
        default="both",
        help="recorded in the manifest; the CSV schema always carries both",
    )
    evolve.add_argument("--out", default=None, help="CSV path (default: stdout)")
    evolve.set_defaults(func=cmd_evolve)

    map_parser = sub.add_parser("map", help="sweep grids as long-format CSV")
    map_sub = map_parser.add_subparsers(dest="submode", required=True)

    time_sep = map_sub.add_parser("time-sep", help="instantaneous measures vs (tau, L)")
    _add_common(time_sep)
    time_sep.add_argument("--mass-ratio", type=float, required=True)
    time_sep.add_argument("--temp-ratio", type=float, default=None)
    time_sep.add_argument("--initial", default="E")
    _add_axis(time_sep, "tau", 0.05, 20.0, 40)
    _add_axis(time_sep, "sep", 0.05, 20.0, 40)
    time_sep.add_argument("--cutoff-c", type=float, default=CONCURRENCE_CUTOFF)
    time_sep.add_argument("--cutoff-n", type=float, default=NEGATIVITY_CUTOFF)
    time_sep.add_argument("--out", required=True)
    time_sep.set_defaults(func=cmd_map_time_sep)

    temp_sep = map_sub.add_parser(
        "temp-sep", help="max-over-time measures vs (T/omega, L)"
    )
    _add_common(temp_sep)
    temp_sep.add_argument("--mass-ratio", type=float, required=True)
    temp_sep.add_argument("--initial", default="E")
    _add_axis(temp_sep, "temp", 0.02, 0.4, 20)
    _add_axis(temp_sep, "sep", 0.05, 20.0, 40)
    temp_sep.add_argument("--cutoff-c", type=float, default=CONCURRENCE_CUTOFF)
    temp_sep.add_argument("--cutoff-n", type=float, default=NEGATIVITY_CUTOFF)
    temp_sep.add_argument("--out", required=True)
    temp_sep.set_defaults(func=cmd_map_temp_sep)

    verify = sub.add_parser("verify", help="run the self-verification suites")
    _add_common(verify)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument(
        "--perturb",
        type=float,
        default=0.0,
        help="fault-injection hook: perturb the coefficient comparison",
    )
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        argv = _merge_config(argv)
    except (OSError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MassbathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
