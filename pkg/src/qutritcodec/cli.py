"""Command-line front end.

Subcommands: ``codec``, ``hom``, ``experiment``, ``optimize``.  Angles are in
degrees.  Exit status is 0 on success, 2 on argument or configuration errors
and 3 when the simulation itself fails (for example an input that can never
be encoded).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import codec, ladder, optimizer
from .codec import EncodingError
from .optics import encoder, hom
from .optics.experiment import ROW_COLUMNS, ConfigError, ExperimentConfig, run_experiment
from .optics.params import ImperfectionParams
from .statekit import BlochAngles, PureState, fidelity

SCHEMA_VERSION = 1

EXIT_USAGE = 2
EXIT_SIMULATION = 3

CODEC_COLUMNS = (
    "code",
    "decode",
    "inputs",
    "encoded",
    "encode_probability",
    "decode_probability",
    "fidelity",
    "fidelity_1",
    "fidelity_2",
)
AVERAGE_COLUMNS = (
    "decode",
    "samples",
    "seed",
    "fidelity",
    "fidelity_1",
    "fidelity_2",
    "fidelity_stderr",
    "fidelity_unweighted",
    "joint_probability",
    "joint_probability_stderr",
    "single_probability_1",
    "single_probability_2",
    "single_probability_stderr",
    "reference_fidelity",
)
HOM_COLUMNS = ("delay", "rate")


class UsageError(Exception):
    pass


def _fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _fmt_complex(z) -> str:
    z = complex(z)
    return f"{_fmt_float(z.real)}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{_fmt_float(abs(z.imag))}j"


def _fmt_state(s: PureState | None) -> str:
    return "" if s is None else " ".join(_fmt_complex(z) for z in s.amplitudes)


def _csv_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt_float(v)
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) else v
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(command: str, columns, rows, fmt: str, meta: dict | None = None) -> str:
    meta = meta or {}
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            **{k: _json_value(v) for k, v in meta.items()},
            "columns": list(columns),
            "rows": [{c: _json_value(r[c]) for c in columns} for r in rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={_csv_value(v)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_csv_value(r[c]) for c in columns])
    return buf.getvalue()


def emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_complex_list(values) -> PureState:
    try:
        amps = [complex(v.replace(" ", "")) for v in values]
    except ValueError as exc:
        raise UsageError(f"bad amplitude: {exc}") from exc
    s = PureState(amps)
    if s.norm == 0.0:
        raise UsageError("state amplitudes are all zero")
    return s.normalize()


def _angles(theta: float, phi: float) -> BlochAngles:
    try:
        return BlochAngles.from_degrees(theta, phi)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# --- codec -----------------------------------------------------------------


def _codec_row(code, decode, inputs, encoded, p_enc, p_dec, fid, f1=math.nan, f2=math.nan):
    return {
        "code": code,
        "decode": decode,
        "inputs": ";".join(_fmt_state(s) for s in inputs),
        "encoded": _fmt_state(encoded),
        "encode_probability": p_enc,
        "decode_probability": p_dec,
        "fidelity": fid,
        "fidelity_1": f1,
        "fidelity_2": f2,
    }


def _overlap(a: PureState, b: PureState | None) -> float:
    return math.nan if b is None else float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def cmd_codec(args) -> str:
    if args.average:
        if args.decode != "joint":
            raise UsageError("--average is available for --decode joint")
        if args.samples < 2:
            raise UsageError("--samples must be at least 2")
        est = codec.average_performance(args.samples, args.seed)
        row = {
            "decode": "joint",
            "samples": args.samples,
            "seed": args.seed,
            "fidelity": est.joint_fidelity,
            "fidelity_1": est.joint_fidelity_1,
            "fidelity_2": est.joint_fidelity_2,
            "fidelity_stderr": est.joint_fidelity_stderr,
            "fidelity_unweighted": est.joint_fidelity_unweighted,
            "joint_probability": est.joint_prob,
            "joint_probability_stderr": est.joint_prob_stderr,
            "single_probability_1": est.single_prob_1,
            "single_probability_2": est.single_prob_2,
            "single_probability_stderr": est.single_prob_stderr,
            "reference_fidelity": codec.JOINT_FIDELITY,
        }
        return render("codec", AVERAGE_COLUMNS, [row], args.format)

    if args.qutrit1 or args.qutrit2:
        if not (args.qutrit1 and args.qutrit2):
            raise UsageError("--qutrit1 and --qutrit2 must be given together")
        t1, t2 = _parse_complex_list(args.qutrit1), _parse_complex_list(args.qutrit2)
        if t1.dim != 3 or t2.dim != 3:
            raise UsageError("qutrits need three amplitudes each")
        which = _decode_index(args.decode, 2)
        state, p_enc = ladder.encode_two_qutrits(t1, t2)
        out, p_dec = ladder.decode_qutrit(state, which)
        fid = _overlap((t1, t2)[which - 1], out)
        return render("codec", CODEC_COLUMNS, [_codec_row("qutrit-5", which, (t1, t2), state, p_enc, p_dec, fid)], args.format)

    if args.n is not None:
        if args.n < 1:
            raise UsageError("--n must be positive")
        thetas = args.thetas or [90.0] * args.n
        phis = args.phis or [0.0] * args.n
        if len(thetas) != args.n or len(phis) != args.n:
            raise UsageError("--thetas and --phis need one value per qubit")
        qs = [_angles(t, p).state() for t, p in zip(thetas, phis)]
        which = _decode_index(args.decode, args.n)
        state, p_enc = ladder.encode_n_qubits(qs)
        out, p_dec = ladder.decode_nth_qubit(state, which)
        fid = _overlap(qs[which - 1], out)
        return render("codec", CODEC_COLUMNS, [_codec_row(f"ladder-{args.n}", which, qs, state, p_enc, p_dec, fid)], args.format)

    q1 = _angles(args.theta1, args.phi1).state()
    q2 = _angles(args.theta2, args.phi2).state()
    enc = codec.encode(q1, q2)
    if args.decode == "joint":
        dec = codec.decode_joint(enc.qutrit)
        f1 = fidelity(q1, dec.per_qubit_states[0])
        f2 = fidelity(q2, dec.per_qubit_states[1])
        row = _codec_row("qutrit", "joint", (q1, q2), enc.qutrit, enc.success_probability, dec.success_probability,
                         (f1 + f2) / 2, f1, f2)
    else:
        which = _decode_index(args.decode, 2)
        out, p_dec = codec.decode_single(enc.qutrit, which)
        fid = _overlap((q1, q2)[which - 1], out)
        f1, f2 = (fid, math.nan) if which == 1 else (math.nan, fid)
        row = _codec_row("qutrit", which, (q1, q2), enc.qutrit, enc.success_probability, p_dec, fid, f1, f2)
    return render("codec", CODEC_COLUMNS, [row], args.format)


def _decode_index(decode: str, n: int) -> int:
    try:
        which = int(decode)
    except ValueError as exc:
        raise UsageError(f"--decode must be an integer in 1..{n} for this code") from exc
    if not 1 <= which <= n:
        raise UsageError(f"--decode must lie in 1..{n}")
    return which


# --- hom -------------------------------------------------------------------


def _load_config(name: str) -> ExperimentConfig:
    path = Path(name)
    if not path.exists():
        builtin = resources.files("qutritcodec") / "configs" / f"{name}.json"
        if not builtin.is_file():
            raise UsageError(f"config {name!r} not found")
        with resources.as_file(builtin) as p:
            return ExperimentConfig.load(p)
    return ExperimentConfig.load(path)


def cmd_hom(args) -> str:
    if not 0.0 < args.R < 1.0:
        raise UsageError("--R must lie in (0, 1)")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    cfg = _load_config(args.config) if args.config else None
    params = cfg.imperfections if cfg else ImperfectionParams()
    pair_rate = cfg.pair_rate if cfg else 1.0
    if args.visibility is not None:
        try:
            m = hom.overlap_for_visibility(args.R, args.visibility)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        params = ImperfectionParams(**{**params.to_dict(), "mode_overlap": m})
    elif args.overlap is not None:
        params = ImperfectionParams(**{**params.to_dict(), "mode_overlap": args.overlap})
    delays = hom.default_delays(params, args.span, args.points)
    scan = hom.hom_dip_scan(args.R, delays, params, pair_rate)
    rates = [r for _, r in scan]
    meta = {
        "reflectance": args.R,
        "mode_overlap": params.mode_overlap,
        "visibility": hom.visibility(rates),
        "visibility_relative": hom.visibility_relative(rates),
    }
    rows = [{"delay": d, "rate": r} for d, r in scan]
    return render("hom", HOM_COLUMNS, rows, args.format, meta)


# --- experiment --------------------------------------------------------------


def cmd_experiment(args) -> str:
    cfg = _load_config(args.config)
    if args.seed is not None or args.mode is not None:
        data = cfg.to_dict()
        if args.seed is not None:
            data["seed"] = args.seed
        if args.mode is not None:
            data["mode"] = args.mode
        cfg = ExperimentConfig.from_dict(data)
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    rows = run_experiment(cfg, workers=args.workers)
    meta = {"mode": cfg.mode, "seed": cfg.seed, "reflectance": cfg.reflectance}
    return render("experiment", ROW_COLUMNS, rows, args.format, meta)


# --- optimize ---------------------------------------------------------------


def cmd_optimize(args) -> str:
    if args.restarts < 1 or args.samples < 2 or not 0 < args.resolution < 0.5:
        raise UsageError("need --restarts >= 1, --samples >= 2 and 0 < --resolution < 0.5")
    res = optimizer.optimize_decoder(restarts=args.restarts, seed=args.seed, n_elements=args.elements,
                                     workers=args.workers)
    mc = optimizer.evaluate_decoder(res.best, n_samples=args.samples, seed=args.seed)
    r_star = encoder.optimal_splitting_ratio(args.resolution)
    ks = res.best.elements.elements
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "optimize",
        "seed": args.seed,
        "restarts": args.restarts,
        "n_elements": args.elements,
        "decoder": {
            "fidelity": res.f,
            "fidelity_1": res.score.f1,
            "fidelity_2": res.score.f2,
            "success_probability": res.score.p,
            "reference_fidelity": codec.JOINT_FIDELITY,
            "gap": res.f - codec.JOINT_FIDELITY,
            "restart_fidelities": list(res.restart_values),
            "monte_carlo": {
                "samples": args.samples,
                "fidelity": mc.f,
                "fidelity_1": mc.f1,
                "fidelity_2": mc.f2,
                "fidelity_1_stderr": mc.f1_stderr,
                "fidelity_2_stderr": mc.f2_stderr,
                "success_probability": mc.p,
                "success_probability_stderr": mc.p_stderr,
            },
            "elements_real": ks.real.tolist(),
            "elements_imag": ks.imag.tolist(),
        },
        "splitting_ratio": {
            "resolution": args.resolution,
            "R_star": r_star,
            "reference": 0.25,
            "gap": r_star - 0.25,
            "damping_factors": list(encoder.damping_factors(r_star)),
        },
    }
    if args.format == "csv":
        rows = [{"key": k, "value": v} for k, v in _flatten(report)]
        return render("optimize", ("key", "value"), rows, "csv")
    return json.dumps(report, indent=2) + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qutritcodec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--out", help="output file (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("codec", help="encode and decode a single input or average over random inputs")
    p.add_argument("--theta1", type=float, default=90.0)
    p.add_argument("--phi1", type=float, default=0.0)
    p.add_argument("--theta2", type=float, default=90.0)
    p.add_argument("--phi2", type=float, default=0.0)
    p.add_argument("--decode", default="1", help="1, 2, ..., or 'joint'")
    p.add_argument("--n", type=int, help="use the N-qubit ladder code")
    p.add_argument("--thetas", type=float, nargs="+")
    p.add_argument("--phis", type=float, nargs="+")
    p.add_argument("--qutrit1", nargs=3, metavar="AMP", help="amplitudes of the first qutrit (complex literals)")
    p.add_argument("--qutrit2", nargs=3, metavar="AMP")
    p.add_argument("--average", action="store_true", help="Monte Carlo average over Bloch-uniform inputs")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_codec)

    p = sub.add_parser("hom", help="Hong-Ou-Mandel dip at the variable-ratio coupler")
    p.add_argument("--R", type=float, default=0.25, help="coupler reflectance")
    p.add_argument("--overlap", type=float, help="mode overlap |<a|b>|^2")
    p.add_argument("--visibility", type=float, help="tune the overlap to reach this dip contrast")
    p.add_argument("--span", type=float, default=8.0, help="delay span in coherence times")
    p.add_argument("--points", type=int, default=81)
    p.add_argument("--config", help="config path or builtin name for imperfections and pair rate")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; the scan is deterministic")
    common(p)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("experiment", help="fidelity sweep over prepared input states")
    p.add_argument("--config", required=True, help="config path or builtin name (ideal, lab)")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=("expected", "shot-noise"))
    p.add_argument("--workers", type=int, default=1, help="processes for the sweep; output order is fixed")
    common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("optimize", help="search decoders and coupler ratios")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples to validate the best decoder")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=float, default=1e-4)
    p.add_argument("--elements", type=int, default=optimizer.MAX_ELEMENTS, choices=range(1, optimizer.MAX_ELEMENTS + 1))
    p.add_argument("--workers", type=int, default=1)
    common(p, fmt=False)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EncodingError, encoder.BalancedCouplerError) as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
