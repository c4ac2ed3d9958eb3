"""Command-line front end.

Exit codes: 0 all certifications pass, 1 a certified inequality failed,
2 invalid configuration, 3 resolution too coarse (unresolved).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import UnresolvedError
from .fourier import DEFAULT_RESOLUTION, Resolution, reference_profile
from .invariants import run_norm_checks
from .probe import CoefficientVector, chain_lower_bound, decay_exponent, min_ratio, random_sphere_point, upper_estimate
from .torus import convergence_study
from .witness import build_family, certificate_hash, certify_level, family_from_certificate

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_UNRESOLVED = 0, 1, 2, 3
OUT_ENV = "FOURIER_LORENTZ_OUT"

_RES = {"cutoff": DEFAULT_RESOLUTION.cutoff, "width": DEFAULT_RESOLUTION.width,
        "knee": DEFAULT_RESOLUTION.knee, "max_width": DEFAULT_RESOLUTION.max_width}

DEFAULTS = {
    "norms check": {"seed": 0, "samples": 200},
    "cp": {"p": 1.5, "X": None, "cells": None, "allow_boundary": False, "tolerance": 1e-2, **_RES},
    "witness build": {"p": 1.5, "eps": 0.25, "levels": 4, "reverify": True, **_RES},
    "witness verify": {"certificate": None, "samples": 200, "seed": 0, "recertify": False},
    "probe ratios": {"target": "lorentz", "kmax": 16, "certificate": None, "p": 1.5, "eps": 0.25,
                     "levels": 4, "budget": 200000, "seed": 0},
    "discrete study": {"p": 1.5, "scales": [16, 64, 256, 1024], "gammas": [], "factor": 1.0},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict
    out: str = field(default="artifacts")

    def to_dict(self) -> dict:
        return {"command": self.command, "params": {k: _jsonable(v) for k, v in sorted(self.params.items())}}


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return None
    return v


def _int_list(s):
    if isinstance(s, list):
        return [int(x) for x in s]
    return [int(x) for x in str(s).split(",") if x.strip()]


def _float_list(s):
    if isinstance(s, list):
        return [float(x) for x in s]
    return [float(x) for x in str(s).split(",") if x.strip()]


def _build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    top = argparse.ArgumentParser(prog="fourier-lorentz", description=__doc__.splitlines()[0])
    top.add_argument("--config", help="JSON file with parameter values (flags override)")
    top.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./artifacts)")
    sub = top.add_subparsers(dest="group", required=True)

    def res_flags(p):
        p.add_argument("--cutoff", type=float, default=S)
        p.add_argument("--width", type=float, default=S)
        p.add_argument("--knee", type=float, default=S)
        p.add_argument("--max-width", dest="max_width", type=float, default=S)

    norms = sub.add_parser("norms").add_subparsers(dest="action", required=True)
    nc = norms.add_parser("check", help="randomized invariant suite")
    nc.add_argument("--seed", type=int, default=S)
    nc.add_argument("--samples", type=int, default=S)

    cp = sub.add_parser("cp", help="certified bracket on c_p")
    cp.add_argument("--p", type=float, default=S)
    cp.add_argument("--X", type=float, default=S, help="uniform layout cutoff")
    cp.add_argument("--cells", type=int, default=S, help="uniform layout cell count")
    cp.add_argument("--allow-boundary", dest="allow_boundary", action="store_true", default=S)
    cp.add_argument("--tolerance", type=float, default=S)
    res_flags(cp)

    wit = sub.add_parser("witness").add_subparsers(dest="action", required=True)
    wb = wit.add_parser("build", help="build and certify a witness family")
    wb.add_argument("--p", type=float, default=S)
    wb.add_argument("--eps", type=float, default=S)
    wb.add_argument("--levels", type=int, default=S)
    wb.add_argument("--no-reverify", dest="reverify", action="store_false", default=S)
    res_flags(wb)
    wv = wit.add_parser("verify", help="check a certificate on random coefficient vectors")
    wv.add_argument("--certificate", default=S)
    wv.add_argument("--samples", type=int, default=S)
    wv.add_argument("--seed", type=int, default=S)
    wv.add_argument("--recertify", action="store_true", default=S)

    pr = sub.add_parser("probe").add_subparsers(dest="action", required=True)
    prr = pr.add_parser("ratios", help="min-ratio study over k = 1, 2, 4, ..., kmax")
    prr.add_argument("--target", choices=("lorentz", "lebesgue"), default=S)
    prr.add_argument("--kmax", type=int, default=S)
    prr.add_argument("--certificate", default=S)
    prr.add_argument("--p", type=float, default=S)
    prr.add_argument("--eps", type=float, default=S)
    prr.add_argument("--levels", type=int, default=S)
    prr.add_argument("--budget", type=int, default=S)
    prr.add_argument("--seed", type=int, default=S)

    ds = sub.add_parser("discrete").add_subparsers(dest="action", required=True)
    dss = ds.add_parser("study", help="torus discrepancy along a scale ladder")
    dss.add_argument("--p", type=float, default=S)
    dss.add_argument("--scales", type=_int_list, default=S)
    dss.add_argument("--gammas", type=_float_list, default=S)
    dss.add_argument("--factor", type=float, default=S, help="multiple of the sequence norm compared")
    return top


def _validate(command: str, prm: dict):
    def need(name, ok, what):
        if not ok:
            raise ConfigError(f"{name}: {what} (got {prm.get(name)!r})")

    def num(name):
        v = prm[name]
        return isinstance(v, (int, float)) and not isinstance(v, bool)

    if "p" in prm:
        p = prm["p"]
        boundary = prm.get("allow_boundary", False)
        need("p", num("p") and (1 < p < 2 or (boundary and p == 2)), "must lie in (1, 2)")
    if "eps" in prm:
        need("eps", num("eps") and 0 < prm["eps"] < 1, "must lie in (0, 1)")
    if "levels" in prm:
        need("levels", isinstance(prm["levels"], int) and 1 <= prm["levels"] <= 8, "must be an integer in [1, 8]")
    for name in ("samples", "budget", "kmax"):
        if name in prm:
            need(name, isinstance(prm[name], int) and prm[name] >= 1, "must be a positive integer")
    if "seed" in prm:
        need("seed", isinstance(prm["seed"], int) and prm["seed"] >= 0, "must be a nonnegative integer")
    for name in ("cutoff", "width", "knee", "max_width", "tolerance", "factor"):
        if name in prm and prm[name] is not None:
            need(name, num(name) and prm[name] > 0, "must be positive")
    if prm.get("X") is not None:
        need("X", num("X") and prm["X"] > 0, "must be positive")
    if prm.get("cells") is not None:
        need("cells", isinstance(prm["cells"], int) and prm["cells"] >= 2, "must be an integer >= 2")
    if command == "witness verify":
        need("certificate", isinstance(prm["certificate"], str), "a certificate path is required")
    if "target" in prm:
        need("target", prm["target"] in ("lorentz", "lebesgue"), "must be lorentz or lebesgue")
    if "scales" in prm:
        s = prm["scales"]
        need("scales", isinstance(s, list) and s and all(isinstance(a, int) and a >= 1 for a in s)
             and all(b > a for a, b in zip(s, s[1:])), "must be increasing positive integers")
    if "gammas" in prm:
        need("gammas", isinstance(prm["gammas"], list) and all(g > 0 for g in prm["gammas"]), "must be positive")


def parse_config(argv, env=None) -> RunConfig:
    """Flags override config-file values, which override defaults."""
    env = os.environ if env is None else env
    ns = _build_parser().parse_args(argv)
    command = ns.group if ns.group == "cp" else f"{ns.group} {ns.action}"
    prm = dict(DEFAULTS[command])
    if ns.config:
        try:
            with open(ns.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {ns.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config: top level must be an object")
        unknown = sorted(set(doc) - set(prm) - {"out"})
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown configuration key for '{command}'")
        out = doc.pop("out", None)
        for k in ("scales",):
            if k in doc:
                doc[k] = _int_list(doc[k])
        if "gammas" in doc:
            doc["gammas"] = _float_list(doc["gammas"])
        prm.update(doc)
    else:
        out = None
    skip = {"config", "out", "group", "action"}
    prm.update({k: v for k, v in vars(ns).items() if k not in skip})
    if prm.get("knee") is None and "knee" in prm:
        prm["knee"] = math.inf
    _validate(command, prm)
    out = ns.out or out or env.get(OUT_ENV) or "artifacts"
    return RunConfig(command, prm, out)


# artifact writing -----------------------------------------------------------

def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_json(cfg: RunConfig, name: str, body: dict, cert_hash: Optional[str]):
    doc = dict(body)
    doc["config"] = cfg.to_dict()
    doc["certificate_sha256"] = cert_hash
    _atomic_write(Path(cfg.out) / name, _dump_json(doc))


def _write_csv(cfg: RunConfig, name: str, columns, rows, cert_hash: Optional[str]):
    buf = io.StringIO()
    buf.write(f"# config={json.dumps(cfg.to_dict(), sort_keys=True, separators=(',', ':'))}\n")
    buf.write(f"# certificate_sha256={cert_hash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    _atomic_write(Path(cfg.out) / name, buf.getvalue())


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def _write_gnuplot(cfg: RunConfig, name: str, csv_name: str, xcol: int, ycols, labels, logx=True, logy=False):
    lines = ["set datafile separator ','", "set key top right"]
    if logx:
        lines.append("set logscale x")
    if logy:
        lines.append("set logscale y")
    plots = [f"'{csv_name}' using {xcol}:{c} with linespoints title '{t}'" for c, t in zip(ycols, labels)]
    lines.append("plot " + ", \\\n     ".join(plots))
    _atomic_write(Path(cfg.out) / name, "\n".join(lines) + "\n")


def _resolution(prm) -> Resolution:
    return Resolution(prm["cutoff"], prm["width"], prm["knee"], prm["max_width"])


# commands ------------------------------------------------------------------

def _cmd_norms(cfg):
    res = run_norm_checks(cfg.params["seed"], cfg.params["samples"])
    rows = [{"check": n, "passed": ok, "detail": d} for n, ok, d in res]
    for r in rows:
        print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['check']}  ({r['detail']})")
    ok = all(r["passed"] for r in rows)
    _write_json(cfg, "norms_check.json", {"checks": rows, "passed": ok}, None)
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_cp(cfg):
    prm = cfg.params
    if prm["X"] is not None or prm["cells"] is not None:
        prof = reference_profile(prm["p"], prm["X"], prm["cells"], allow_boundary=prm["allow_boundary"],
                                 tolerance=prm["tolerance"])
    else:
        prof = reference_profile(prm["p"], resolution=_resolution(prm), allow_boundary=prm["allow_boundary"],
                                 tolerance=prm["tolerance"])
    body = {"profile": prof.to_json(), "indicator_norm": prof.indicator_norm.to_dict(), "complete": True}
    _write_json(cfg, "cp.json", body, None)
    print(f"c_p in [{prof.cp.lo:.10f}, {prof.cp.hi:.10f}]  width {prof.cp.width:.3e}")
    return EXIT_OK


def _family_for(cfg):
    prm = cfg.params
    if prm.get("certificate"):
        with open(prm["certificate"]) as fh:
            doc = json.load(fh)
        doc.pop("config", None)
        doc.pop("certificate_sha256", None)
        return family_from_certificate(doc), certificate_hash(doc)
    fam = build_family(prm["p"], prm["eps"], prm["levels"])
    return fam, fam.sha256


def _cmd_witness_build(cfg):
    prm = cfg.params
    fam = build_family(prm["p"], prm["eps"], prm["levels"], _resolution(prm), reverify=prm["reverify"])
    doc = fam.certificate()
    h = certificate_hash(doc)
    _atomic_write(Path(cfg.out) / "certificate.json", _dump_json({**doc, "config": cfg.to_dict(), "certificate_sha256": h}))
    for l in fam.levels:
        m = l.cert.margins()
        print(f"level {l.j}: a = {l.a}  margins " + "  ".join(f"{k}={v:.3e}" for k, v in m.items()))
    print(f"disjoint: {fam.disjointness}  certified: {fam.certified}  sha256 {h}")
    return EXIT_OK if fam.certified else EXIT_FAIL


def _cmd_witness_verify(cfg):
    prm = cfg.params
    fam, h = _family_for(cfg)
    failures = []
    if not fam.certified:
        failures.append("stored certificate does not pass")
    if prm["recertify"]:
        res = Resolution.from_dict(fam.parameters["resolution"])
        prof = reference_profile(fam.p, resolution=res)
        for l in fam.levels:
            c = certify_level(prof, l.gamma, l.eta, l.nuL, l.nuR, l.deltaL, l.deltaR)
            if not c.passed:
                failures.append(f"level {l.j} fails on recomputation")
    rng = np.random.default_rng(prm["seed"])
    eps, lo = fam.epsilon, fam.cp.lo
    threshold = lo * (1 - 1.5 * eps) / (1 + eps)
    rows = []
    if not failures:
        for i in range(prm["samples"]):
            cv = random_sphere_point(fam.J, fam.p, rng)
            up = upper_estimate(fam, cv)
            ch = chain_lower_bound(fam, cv)
            ok = up <= cv.A * (1 + eps) and ch >= cv.A * lo * (1 - 1.5 * eps) and ch / up >= threshold
            rows.append({"sample": i, "A": cv.A, "upper": up, "chain": ch, "ratio": ch / up,
                         "threshold": threshold, "ok": ok})
        bad = sum(not r["ok"] for r in rows)
        if bad:
            failures.append(f"{bad} samples violate the isomorphism bounds")
    cols = ["sample", "A", "upper", "chain", "ratio", "threshold", "ok"]
    _write_csv(cfg, "verify.csv", cols, rows, h)
    body = {"samples": len(rows), "threshold": threshold, "failures": failures, "passed": not failures,
            "min_ratio": min((r["ratio"] for r in rows), default=None)}
    _write_json(cfg, "verify.json", body, h)
    for f in failures:
        print("FAIL", f)
    print(f"{len(rows)} samples, threshold {threshold:.6f}, " + ("all pass" if not failures else "FAILED"))
    return EXIT_OK if not failures else EXIT_FAIL


def _cmd_probe(cfg):
    prm = cfg.params
    fam, h = _family_for(cfg)
    ks = [1 << i for i in range(int(math.log2(prm["kmax"])) + 1)]
    reports = [min_ratio(fam, k, prm["target"], prm["budget"], prm["seed"]) for k in ks]
    rows = [r.to_row() for r in reports]
    name = f"ratios_{prm['target']}"
    _write_csv(cfg, f"{name}.csv", ["k", "target", "min_ratio", "converged", "seed", "budget", "model"], rows, h)
    slope = decay_exponent(reports) if len(reports) >= 3 else None
    body = {"reports": rows, "decay_exponent": slope, "family_levels": fam.J,
            "note": "levels beyond the built family use the disjoint-support model"}
    _write_json(cfg, f"{name}.json", body, h)
    _write_gnuplot(cfg, f"{name}.gp", f"{name}.csv", 1, [3], [f"min ratio ({prm['target']})"], logy=True)
    for r in reports:
        print(f"k={r.k:3d}  min ratio {r.min_ratio:.6f}  converged={r.converged}  model={r.model}")
    print(f"decay exponent {slope}")
    return EXIT_OK


def _cmd_discrete(cfg):
    prm = cfg.params
    st = convergence_study(prm["p"], prm["scales"], prm["gammas"], sequence_factor=prm["factor"])
    cols = ["a", "p", "continuous_lo", "continuous_hi", "sequence_lo", "sequence_hi", "discrepancy_hi"]
    _write_csv(cfg, "discrete_study.csv", cols, st["rows"], None)
    ups = [r["discrepancy_hi"] for r in st["rows"]]
    body = {"rows": st["rows"], "a0": st["a0"], "cp": st["cp"],
            "nonincreasing": all(b <= a for a, b in zip(ups, ups[1:]))}
    _write_json(cfg, "discrete_study.json", body, None)
    _write_gnuplot(cfg, "discrete_study.gp", "discrete_study.csv", 1, [7], ["discrepancy upper end"], logy=True)
    for r in st["rows"]:
        print(f"a={r['a']:6d}  discrepancy <= {r['discrepancy_hi']:.6f}")
    return EXIT_OK


COMMANDS = {
    "norms check": _cmd_norms,
    "cp": _cmd_cp,
    "witness build": _cmd_witness_build,
    "witness verify": _cmd_witness_verify,
    "probe ratios": _cmd_probe,
    "discrete study": _cmd_discrete,
}


def run(cfg: RunConfig) -> int:
    try:
        return COMMANDS[cfg.command](cfg)
    except UnresolvedError as exc:
        _write_json(cfg, "incomplete.json", {"complete": False, "error": str(exc),
                                             "level": exc.level}, None)
        print(f"unresolved: {exc}", file=sys.stderr)
        return EXIT_UNRESOLVED


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # argparse usage errors already printed
        return EXIT_CONFIG if exc.code else EXIT_OK
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
