"""gibbsflow command line: samplers, solvers, dichotomy calculators, and
experiments with reproducible configs.

Every file-writing run serializes its fully resolved configuration
(defaults included) next to the output as <out>.config.json; rerunning
with ``gibbsflow --config <that file>`` reproduces the output byte for
byte.  Exit codes: 0 unflagged success, 1 usage or configuration error,
2 flagged statistical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import integrators as it
from . import measures as ms
from . import presets
from .fields import GaussianFieldSpec, sample
from .parallel import default_threads
from .rng import RandomSeed
from .serialize import (
    INVARIANCE_CSV_COLUMNS,
    LDP_CSV_COLUMNS,
    SCHEMA_VERSION,
    canonical_dumps,
    invariance_csv_rows,
    ldp_csv_rows,
    to_jsonable,
    write_csv,
)
from .spectral import TorusField, field_from_json, field_to_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FLAGGED = 2


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit with code 1 (2 means flagged stats)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(args_dict: dict, payload: dict, out: str | None,
          csv_columns=None, csv_rows=None) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    text = canonical_dumps(payload)
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
    config = {"schema_version": SCHEMA_VERSION, "resolved_args": args_dict}
    Path(str(out) + ".config.json").write_text(canonical_dumps(config))
    if csv_rows is not None and args_dict.get("csv"):
        write_csv(args_dict["csv"], csv_columns, csv_rows)


def _seed(args) -> RandomSeed:
    return RandomSeed(args.seed, args.stream)


def _field_spec_from_args(args) -> GaussianFieldSpec:
    return GaussianFieldSpec(
        family=args.family,
        n_max=args.nmax,
        alpha=args.alpha,
        real_valued=args.real,
        mean_zero=True if args.mean_zero else None,
    )


# ---------------------------------------------------------------------------
# Subcommand handlers (each takes the resolved args namespace dict)
# ---------------------------------------------------------------------------

def _run_sample(a: dict) -> int:
    spec = GaussianFieldSpec(
        family=a["family"], n_max=a["nmax"], alpha=a["alpha"],
        real_valued=a["real"], mean_zero=True if a["mean_zero"] else None,
    )
    f = sample(spec, RandomSeed(a["seed"], a["stream"]))
    _emit(a, {"kind": "sample", "field": field_to_json(f)}, a["out"])
    return EXIT_OK


def _run_evolve(a: dict) -> int:
    init = field_from_json(json.loads(Path(a["init"]).read_text()))
    if a["nmax"] is not None:
        from .spectral import truncate
        init = truncate(init, a["nmax"])
    eq = it.EquationSpec(
        family=a["eq"].replace("-", "_"), p=a["p"], sign=a["sign"],
        galerkin_projected=a["galerkin"],
    )
    cfg = it.SolverConfig(dt=a["dt"], t_final=a["t"],
                          record_every=a["record_every"])
    traj = it.evolve(init, eq, cfg)
    payload = {
        "kind": "trajectory",
        "times": traj.times,
        "fields": [field_to_json(f) for f in traj.fields],
        "mass_series": traj.mass_series,
        "hamiltonian_series": traj.hamiltonian_series,
        "blowup_flag": traj.blowup,
        "last_valid_time": traj.last_valid_time,
        "dt_effective": traj.dt_effective,
    }
    _emit(a, payload, a["out"])
    return EXIT_FLAGGED if traj.blowup else EXIT_OK


def _run_invariance(a: dict) -> int:
    p = presets.invariance_preset(a["preset"], a["nmax"])
    m = a["samples"] or p["m_samples"]
    t_final = p["t_final"] if a["t"] is None else a["t"]
    dt = a["dt"] or p["dt"]
    report = ex.invariance_experiment(
        p["measure"], p["eq"], t_final, m, RandomSeed(a["seed"], a["stream"]),
        dt=dt, alpha=a["alpha"],
        ais_levels=p.get("ais_levels", 96),
        ais_pcn_steps=p.get("ais_pcn_steps", 3),
        n_threads=a["threads"],
    )
    _emit(a, {"kind": "invariance", "preset": a["preset"], "report": to_jsonable(report)},
          a["out"], INVARIANCE_CSV_COLUMNS, invariance_csv_rows(report))
    expected_rejection = a["preset"] == "negative-control"
    failed = report.any_rejection != expected_rejection or \
        (report.flagged and not expected_rejection)
    return EXIT_FLAGGED if failed else EXIT_OK


def _run_cm(a: dict) -> int:
    p = presets.cm_preset(a["preset"], a["nmax"])
    report = ex.cameron_martin_experiment(
        p["v0"], p["base"], p["eq"],
        t_final=p["t_final"] if a["t"] is None else a["t"],
        m_samples=a["samples"] or p["m_samples"],
        seed=RandomSeed(a["seed"], a["stream"]),
        dt=a["dt"] or p["dt"],
        evolve_samples=(p["evolve_samples"] if a["evolve_samples"] is None
                        else a["evolve_samples"]),
        v0_decay=p.get("v0_decay"),
    )
    _emit(a, {"kind": "cameron_martin", "preset": a["preset"],
              "report": to_jsonable(report)}, a["out"])
    ok = report.identities_pass and report.blowup_count == 0
    return EXIT_OK if ok else EXIT_FLAGGED


def _run_dichotomy(a: dict) -> int:
    if a["mode"] == "kakutani":
        verdict = ms.kakutani_power_law(a["u_decay"], a["v_decay"], a["nmax"])
    else:
        verdict = ms.feldman_hajek_statistic(a["beta"], a["gamma"], a["s"], a["nmax"])
    _emit(a, {"kind": "dichotomy", "mode": a["mode"], "report": to_jsonable(verdict)},
          a["out"])
    return EXIT_OK


def _run_ldp(a: dict) -> int:
    base = GaussianFieldSpec(
        family=a["family"], n_max=a["nmax"], alpha=a["alpha"],
        real_valued=a["real"], mean_zero=True if a["mean_zero"] else None,
    )
    n = a["nmax"]
    center = np.zeros(2 * n + 1, dtype=np.complex128)
    center[a["center_mode"] + n] = a["center_value"]
    if a["real"] and a["center_mode"] != 0:
        center[-a["center_mode"] + n] = a["center_value"]
    center_field = TorusField(n, center, a["real"])
    v0 = TorusField(n, np.zeros(2 * n + 1, dtype=np.complex128), a["real"])
    epsilons = [float(e) for e in a["epsilons"].split(",")]
    m_counts = [int(v) for v in str(a["samples"]).split(",")]
    if len(m_counts) == 1:
        m_counts = m_counts[0]
    report = ex.ldp_mc(v0, base, center_field, a["radius"], a["s"],
                       epsilons, m_counts, RandomSeed(a["seed"], a["stream"]))
    _emit(a, {"kind": "ldp", "report": to_jsonable(report)}, a["out"],
          LDP_CSV_COLUMNS, ldp_csv_rows(report))
    return EXIT_OK if report.trend_ok else EXIT_FLAGGED


def _run_entropy_check(a: dict) -> int:
    cells = a["cells"]
    span = a["span"]
    q = np.linspace(-span, span, cells, endpoint=False) + span / cells
    h = q ** 2 / 2.0 if a["hamiltonian"] == "gaussian" else q ** 4
    report = ms.entropy_check_finite_dim(
        h, a["beta"], 2.0 * span / cells,
        n_directions=a["directions"], seed=RandomSeed(a["seed"], a["stream"]),
    )
    _emit(a, {"kind": "entropy_check", "hamiltonian": a["hamiltonian"],
              "report": to_jsonable(report)}, a["out"])
    ok = report.all_nonincreasing and report.strict_decrease
    return EXIT_OK if ok else EXIT_FLAGGED


_HANDLERS = {
    "sample": _run_sample,
    "evolve": _run_evolve,
    "invariance": _run_invariance,
    "cm": _run_cm,
    "dichotomy": _run_dichotomy,
    "ldp": _run_ldp,
    "entropy-check": _run_entropy_check,
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(
        prog="gibbsflow",
        description=__doc__,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--config", default=None,
                        help="rerun from a saved <out>.config.json file")
    parser.add_argument("--out", default=None, dest="top_out",
                        help="with --config: override the recorded output path")
    sub = parser.add_subparsers(dest="subcommand")

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="base seed")
        p.add_argument("--stream", type=int, default=0, help="stream index")
        p.add_argument("--out", default=None, help="output JSON path (stdout if unset)")
        p.add_argument("--csv", default=None, help="optional CSV output path")
        p.add_argument("--threads", type=int, default=default_threads(),
                       help="worker threads (results identical for any count)")

    p = sub.add_parser("sample", help="draw one random field",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--family", choices=["fwa", "fwb", "white"], default="fwb")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--nmax", type=int, default=64)
    p.add_argument("--real", action="store_true", help="real-valued field")
    p.add_argument("--mean-zero", dest="mean_zero", action="store_true",
                   help="exclude the zero mode")
    common(p)

    p = sub.add_parser("evolve", help="integrate one initial field",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--eq", choices=["nls", "wick-nls", "gkdv"], required=True)
    p.add_argument("--p", type=int, default=4, help="nonlinearity power")
    p.add_argument("--sign", choices=["plus", "minus"], default="plus")
    p.add_argument("--galerkin", action="store_true",
                   help="re-truncate the nonlinearity to the data band")
    p.add_argument("--nmax", type=int, default=None,
                   help="re-truncate the initial field before evolving")
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--t", type=float, required=True, help="final time")
    p.add_argument("--record-every", dest="record_every", type=int, default=0)
    p.add_argument("--init", required=True, help="initial field JSON file")
    common(p)

    p = sub.add_parser("invariance", help="two-ensemble invariance test",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--preset", choices=sorted(presets.INVARIANCE_PRESETS),
                   default="kdv-white-noise")
    p.add_argument("--nmax", type=int, default=None, help="override truncation")
    p.add_argument("--samples", type=int, default=None, help="override sample count")
    p.add_argument("--t", type=float, default=None, help="override horizon")
    p.add_argument("--dt", type=float, default=None, help="override time step")
    p.add_argument("--alpha", type=float, default=0.01, help="rejection level")
    common(p)

    p = sub.add_parser("cm", help="shift-identity and shifted-data experiment",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--preset", choices=sorted(presets.CM_PRESETS),
                   default="theorem-1")
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--evolve-samples", dest="evolve_samples", type=int, default=None)
    common(p)

    p = sub.add_parser("dichotomy", help="equivalence-vs-singularity calculators",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--mode", choices=["kakutani", "feldman-hajek"], required=True)
    p.add_argument("--u-decay", dest="u_decay", type=float, default=1.0)
    p.add_argument("--v-decay", dest="v_decay", type=float, default=1.4)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--nmax", type=int, default=100000)
    common(p)

    p = sub.add_parser("ldp", help="small-noise hit-probability study",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--family", choices=["fwa", "fwb", "white"], default="fwb")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--real", action="store_true")
    p.add_argument("--mean-zero", dest="mean_zero", action="store_true")
    p.add_argument("--nmax", type=int, default=0)
    p.add_argument("--center-mode", dest="center_mode", type=int, default=0)
    p.add_argument("--center-value", dest="center_value", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=0.3)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--epsilons", default="0.5,0.35,0.25")
    p.add_argument("--samples", default="200000",
                   help="per-epsilon sample count (single value or comma list)")
    common(p)

    p = sub.add_parser("entropy-check", help="entropy maximization on a grid",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--hamiltonian", choices=["gaussian", "quartic"],
                   default="gaussian")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--cells", type=int, default=4096)
    p.add_argument("--span", type=float, default=8.0)
    p.add_argument("--directions", type=int, default=20)
    common(p)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        saved = json.loads(Path(args.config).read_text())
        resolved = dict(saved["resolved_args"])
        if args.top_out is not None:
            resolved["out"] = args.top_out
    else:
        if args.subcommand is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        resolved = {k: v for k, v in vars(args).items()
                    if k not in ("config", "top_out")}
    handler = _HANDLERS.get(resolved.get("subcommand"))
    if handler is None:
        print(f"gibbsflow: unknown subcommand {resolved.get('subcommand')!r}",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        return handler(resolved)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as err:
        print(f"gibbsflow: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
