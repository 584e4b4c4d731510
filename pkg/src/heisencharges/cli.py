"""Command-line front end: ``heisencharges <verb> ...``.

Every verb prints one payload (JSON with a ``schema`` key, or CSV with a
header row) on stdout and a run manifest as a single JSON line on stderr.
Exit codes: 0 success, 2 bad input, 3 math error (pole proximity, degree cap,
root-finding failure).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from datetime import datetime, timezone
from importlib import metadata

import numpy as np

from . import conjecture, ensemble, exact, monodromy, poles, thermo

EXIT_OK, EXIT_INPUT, EXIT_MATH = 0, 2, 3


class InputError(ValueError):
    pass


def _num(x):
    """Round floats to 15 significant digits for output."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.15g}") if np.isfinite(x) else str(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.15g}" if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(_num(obj), sort_keys=True) + "\n"


def _psi(text: str) -> monodromy.SpinState:
    try:
        return monodromy.SpinState.parse(text)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _grid_values(text: str) -> np.ndarray:
    """``"0"``, ``"0,1,2.5"`` or ``"lo:hi:n"``."""
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return np.linspace(float(lo), float(hi), int(n))
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise InputError(f"bad grid {text!r}") from exc


def _mu_values(texts) -> np.ndarray:
    vals = []
    for t in texts:
        for part in t.split(","):
            part = part.strip().replace(" ", "")
            if not part:
                continue
            try:
                vals.append(complex(part))
            except ValueError as exc:
                raise InputError(f"bad mu value {part!r}") from exc
    if not vals:
        raise InputError("no mu values given")
    return np.array(vals)


def _grid_spec(text: str | None) -> conjecture.GridSpec:
    if text is None:
        return conjecture.GridSpec()
    try:
        lo, hi, n = text.split(":")
        return conjecture.GridSpec(float(lo), float(hi), int(n))
    except ValueError as exc:
        raise InputError(f"bad grid {text!r}; expected lo:hi:points") from exc


# verbs ------------------------------------------------------------------------

def cmd_charge(a) -> str:
    psi = _psi(a.psi)
    if a.numeric:
        mus = _mu_values(a.mu or ["0"])
        xs = np.atleast_1d(monodromy.charge_numeric(psi, a.jj, mus))
        rows = [(m.real, m.imag, x.real, x.imag) for m, x in zip(mus, xs)]
        if a.out == "csv":
            return _csv(["mu_re", "mu_im", "X_re", "X_im"], rows)
        return _dump({"schema": "heisencharges.charge_values/1", "psi": str(psi), "jj": a.jj,
                      "values": [dict(zip(["mu_re", "mu_im", "X_re", "X_im"], r)) for r in rows]})
    rc = exact.charge_exact(psi, a.jj, degree_cap=a.degree_cap)
    if a.out == "csv":
        rows = [("prefactor", "", f"{rc.prefactor}")]
        rows += [("numerator", 2 * k, str(c)) for k, c in enumerate(rc.num)]
        rows += [("denominator", 2 * k, str(c)) for k, c in enumerate(rc.den)]
        return _csv(["part", "power_of_mu", "coefficient"], rows)
    d = rc.to_json_dict()
    d["pretty"] = rc.pretty()
    return json.dumps(d, sort_keys=True) + "\n"


def cmd_poles(a) -> str:
    psi = _psi(a.psi)
    rc = exact.charge_exact(psi, a.jj)
    ps = poles.find_poles(rc)
    if a.out == "csv":
        return ps.to_csv()
    strip = poles.classify_physical_strip(ps)
    out = {"schema": "heisencharges.poles/1", "psi": str(psi), "jj": a.jj,
           "residual": ps.residual, "min_abs_imag": strip.min_distance,
           "inside_physical_strip": len(strip.inside_PS),
           "poles": [{"re_mu": z.real, "im_mu": z.imag, "multiplicity": int(m)}
                     for z, m in zip(ps.roots, ps.multiplicities)]}
    if a.jj == 1:
        out["hyperbola_residual"] = poles.hyperbola_check(ps)
        out["curve_match_distance"] = poles.match_to_curve(ps)
    return _dump(out)


def cmd_deviation(a) -> str:
    psi = _psi(a.psi)
    grid = _grid_spec(a.grid)
    if a.out == "csv":
        return conjecture.curve_csv(psi, a.jj, grid)
    res = conjecture.deviation(psi, a.jj, grid, backend=a.backend)
    return _dump({"schema": "heisencharges.deviation/1", "psi": str(psi), "jj": a.jj,
                  "r": str(conjecture.state_ratio(psi)), "delta": res.delta,
                  "mu_at_sup": res.mu_at_sup, "backend": res.backend, "excluded_points": res.excluded})


def cmd_ensemble(a) -> str:
    cfg = ensemble.EnsembleConfig(M=a.M, jj=a.jj, count=a.count, seed=a.seed, grid=_grid_spec(a.grid),
                                  backend=a.backend, parallelism=a.workers, bins=a.bins)

    def progress(i, n):
        print(f"\r{i}/{n}", end="" if i < n else "\n", file=sys.stderr, flush=True)

    rep = ensemble.run_ensemble(cfg, progress=None if a.quiet else progress)
    return rep.histogram_csv() if a.out == "csv" else rep.to_json() + "\n"


def cmd_gibbs(a) -> str:
    mus = _grid_values(a.mu_grid)
    g = np.atleast_1d(thermo.gibbs_average(a.jj, mus))
    xi = np.atleast_1d(np.real(conjecture.x_infinity(a.jj, mus)))
    rows = list(zip(mus, g, xi))
    if a.out == "csv":
        return _csv(["mu", "gibbs_average", "X_infinity"], rows)
    return _dump({"schema": "heisencharges.gibbs/1", "jj": a.jj,
                  "values": [{"mu": m, "gibbs_average": v, "X_infinity": x} for m, v, x in rows]})


def cmd_densities(a) -> str:
    mus = _grid_values(a.mu_grid)
    jjs = [int(j) for j in a.jj.split(",")]
    if a.out == "csv":
        return thermo.densities_csv(jjs, mus)
    out = {"schema": "heisencharges.densities/1", "y_system_residual": thermo.y_system_check(max(jjs)),
           "densities": []}
    for jj in jjs:
        d = thermo.string_densities(jj, mus)
        out["densities"].append({"jj": jj, "eta": thermo.eta(jj), "mu": list(mus),
                                 "rho": list(np.atleast_1d(d.rho)), "rho_bar": list(np.atleast_1d(d.rho_bar))})
    return _dump(out)


def cmd_curve(a) -> str:
    cs = poles.curve_solutions(a.M)
    rows = [(int(k), s.real, s.imag, m.real, m.imag) for k, s, m in zip(cs.k, cs.mu_sq, cs.mu)]
    header = ["k", "mu_sq_re", "mu_sq_im", "mu_re", "mu_im"]
    if a.out == "csv":
        return _csv(header, rows)
    return _dump({"schema": "heisencharges.curve/1", "M": a.M, "solutions": [dict(zip(header, r)) for r in rows]})


def cmd_decay(a) -> str:
    try:
        pair = ensemble.GeneralStatePair(_psi(a.psi_m), _psi(a.psi_n))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    norms = ensemble.offdiagonal_decay(pair, a.jj, a.mu, a.repeats)
    if a.out == "csv":
        return _csv(["repeats", "norm"], [(k + 1, v) for k, v in enumerate(norms)])
    return _dump({"schema": "heisencharges.decay/1", "psi_m": str(pair.psi_m), "psi_n": str(pair.psi_n),
                  "jj": a.jj, "mu": a.mu, "norms": list(norms), "decays": ensemble.decays(norms)})


# parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heisencharges", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(func=fn)
        s.add_argument("--out", choices=["json", "csv"], default="json")
        return s

    s = verb("charge", cmd_charge, "exact or numeric charge of a product state")
    s.add_argument("--psi", required=True)
    s.add_argument("--jj", type=int, required=True)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--numeric", action="store_true")
    s.add_argument("--mu", action="append", help="comma-separated (complex) points; repeatable")
    s.add_argument("--degree-cap", type=int, default=exact.DEFAULT_DEGREE_CAP)

    s = verb("poles", cmd_poles, "poles of the exact charge")
    s.add_argument("--psi", required=True)
    s.add_argument("--jj", type=int, required=True)

    s = verb("deviation", cmd_deviation, "sup relative deviation from the large-mu formula")
    s.add_argument("--psi", required=True)
    s.add_argument("--jj", type=int, required=True)
    s.add_argument("--grid", help="lo:hi:points (default -10:10:2001)")
    s.add_argument("--backend", choices=["auto", "exact", "numeric"], default="auto")

    s = verb("ensemble", cmd_ensemble, "deviation statistics over seeded random states")
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--jj", type=int, required=True)
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--grid")
    s.add_argument("--backend", choices=["auto", "exact", "numeric"], default="auto")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--bins", type=int, default=20)
    s.add_argument("--quiet", action="store_true")

    s = verb("gibbs", cmd_gibbs, "infinite-temperature average")
    s.add_argument("--jj", type=int, required=True)
    s.add_argument("--mu-grid", required=True, help='"0", "0,1,2" or "lo:hi:n"')

    s = verb("densities", cmd_densities, "string densities and their ratio")
    s.add_argument("--jj", required=True, help="one or more comma-separated values")
    s.add_argument("--mu-grid", default="-5:5:101")

    s = verb("curve", cmd_curve, "solutions of the pole curve for length M")
    s.add_argument("--M", type=int, required=True)

    s = verb("decay", cmd_decay, "norms of repeated mixed-block products")
    s.add_argument("--psi-m", required=True)
    s.add_argument("--psi-n", required=True)
    s.add_argument("--jj", type=int, required=True)
    s.add_argument("--mu", type=float, default=1.0)
    s.add_argument("--repeats", type=int, default=10)
    return p


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def manifest(argv, args, payload: str) -> dict:
    return {"schema": "heisencharges.manifest/1", "command": args.verb, "arguments": list(argv),
            "seed": getattr(args, "seed", None), "version": _version(),
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "output_sha256": hashlib.sha256(payload.encode()).hexdigest()}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code not in (None, 0) else EXIT_OK
    try:
        if getattr(args, "jj", None) is not None and not isinstance(args.jj, str) and args.jj < 1:
            raise InputError("jj must be a positive integer")
        payload = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, exact.DegreeCapError, poles.RootFindingError) as exc:
        print(f"math error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(payload)
    print(json.dumps(manifest(argv, args, payload), sort_keys=True), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
