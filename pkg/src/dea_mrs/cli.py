"""``dea`` command line: efficiency scores and maximal reference sets.

Exit codes: 0 success, 2 bad data or arguments, 3 solver failure, 4 the
methods of ``--method all`` disagree. Records carry no timing; timing lives
under ``meta`` so identical runs give identical ``results``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import dataset as dataset_mod
from . import dea, mrs
from ._kernels import backend
from .errors import ConfigurationError, DatasetError, SolverError
from .lp import Tolerances
from .milp import DEFAULT_BIG_M

EXIT_OK = 0
EXIT_DATA = 2
EXIT_SOLVER = 3
EXIT_DISAGREE = 4

MODELS = ("bcc", "additive", "ram")
METHODS = ("primal-milp", "lp-procedure", "dual-milp", "oracle", "all")

_BCC_ROUTES = {
    "primal-milp": mrs.PRIMAL_MILP,
    "lp-procedure": mrs.LP_PROCEDURE,
    "dual-milp": mrs.DUAL_MILP,
    "oracle": mrs.ORACLE,
}
# non-radial models only have a MILP and the per-DMU face oracle
_NONRADIAL_ROUTES = {"primal-milp": mrs.ADDITIVE_MILP, "oracle": mrs.ORACLE}

_NUM = {"type": ["number", "null"]}
_NAMES = {"type": ["array", "null"], "items": {"type": "string"}}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["dataset", "results", "meta"],
    "additionalProperties": False,
    "properties": {
        "dataset": {
            "type": "object",
            "required": ["source", "n", "m", "s", "inputs", "outputs", "dmus"],
            "properties": {
                "source": {"type": "string"},
                "n": {"type": "integer", "minimum": 1},
                "m": {"type": "integer", "minimum": 1},
                "s": {"type": "integer", "minimum": 1},
                "inputs": {"type": "array", "items": {"type": "string"}},
                "outputs": {"type": "array", "items": {"type": "string"}},
                "dmus": {"type": "array", "items": {"type": "string"}},
            },
        },
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "dmu",
                    "model",
                    "theta_star",
                    "sigma_star",
                    "classification",
                    "mrs",
                    "efficient_mrs",
                    "method",
                    "witness",
                ],
                "additionalProperties": False,
                "properties": {
                    "dmu": {"type": "string"},
                    "model": {"enum": list(MODELS)},
                    "theta_star": _NUM,
                    "sigma_star": _NUM,
                    "classification": {"type": "string"},
                    "mrs": _NAMES,
                    "efficient_mrs": _NAMES,
                    "method": {"type": ["string", "null"]},
                    "witness": {"type": "object"},
                    "notes": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "meta": {
            "type": "object",
            "required": ["config"],
            "properties": {
                "timing_ms": {"type": "number", "minimum": 0},
                "per_dmu_ms": {"type": "object", "additionalProperties": {"type": "number"}},
                "config": {"type": "object"},
                "backend": {"type": "string"},
            },
        },
    },
}


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    model: str = "bcc"
    method: str = "all"
    dmus: Optional[list] = None
    eps_feas: float = 1e-9
    eps_pos: float = 1e-7
    eps_rc: float = 1e-9
    eps_obj: float = 1e-9
    big_M: float = DEFAULT_BIG_M
    format: str = "json"
    output: Optional[str] = None
    jobs: int = 1
    oracle: bool = True
    timing: bool = True

    @property
    def tol(self) -> Tolerances:
        return Tolerances(feas=self.eps_feas, pos=self.eps_pos, rc=self.eps_rc, obj=self.eps_obj)


@dataclass
class Report:
    dataset: dict
    results: list
    meta: dict
    disagreements: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({"dataset": self.dataset, "results": self.results, "meta": self.meta}, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dmu", "model", "theta_star", "sigma_star", "classification", "mrs", "efficient_mrs", "method"])
        for r in self.results:
            w.writerow(
                [
                    r["dmu"],
                    r["model"],
                    _cell(r["theta_star"]),
                    _cell(r["sigma_star"]),
                    r["classification"],
                    "" if r["mrs"] is None else "|".join(r["mrs"]),
                    "" if r["efficient_mrs"] is None else "|".join(r["efficient_mrs"]),
                    r["method"] or "",
                ]
            )
        return buf.getvalue()


class UsageError(Exception):
    pass


def _cell(v):
    return "" if v is None else repr(v)


def _r(x):
    """Round for reproducible output; ``-0.0`` becomes ``0.0``."""
    return round(float(x), 9) + 0.0


def _vec(v):
    return [_r(x) for x in np.asarray(v, dtype=float)]


def _by_name(ds, v, keep=None):
    v = np.asarray(v, dtype=float)
    return {ds.dmus[j].name: _r(v[j]) for j in range(ds.n) if keep is None or keep(j, v[j])}


def _witness(ds, res: mrs.MrsResult) -> dict:
    w = res.witness
    if res.method == mrs.DUAL_MILP:
        out = {
            "V": _vec(w["V"]),
            "U": _vec(w["U"]),
            "u_o": _r(w["u_o"]),
            "objective": _r(w["objective"]),
            "binding": [ds.dmus[j].name for j in sorted(res.members)],
            "min_nonmember_gap": _r(w["min_nonmember_gap"]),
        }
    else:
        lam = np.nan_to_num(np.asarray(w["lambda"], dtype=float))
        out = {"lambda": _by_name(ds, lam, lambda j, x: x != 0.0)}
        if "min_member_weight" in w:
            out["min_member_weight"] = _r(w["min_member_weight"])
    if res.objective is not None:
        out["milp_objective"] = _r(res.objective)
    if res.method == mrs.LP_PROCEDURE:
        out["iterations"] = res.iterations
    return out


# -- per-DMU work (top level so worker processes can import it) -------------


def _weights(ds, model):
    if model == "ram":
        return dea.ram_weights(ds)
    return np.ones(ds.m), np.ones(ds.s)


def _score(ds, o, cfg: RunConfig):
    tol = cfg.tol
    if cfg.model == "bcc":
        r = dea.bcc_evaluate(ds, o, tol)
        return r.theta_star, None, r.classification, r
    w = _weights(ds, cfg.model)
    a = dea.additive_evaluate(ds, o, tol, weights=w)
    cls = "efficient" if a.sigma_star <= tol.pos else "inefficient"
    return None, a.sigma_star, cls, a


def _eval_record(ds, o, cfg):
    theta, sigma, cls, r = _score(ds, o, cfg)
    witness = {
        "lambda": _by_name(ds, r.lam, lambda j, x: abs(x) > cfg.tol.feas),
        "slacks_in": _vec(r.slacks_in),
        "slacks_out": _vec(r.slacks_out),
    }
    if cfg.model == "bcc":
        mult = dea.multiplier_evaluate(ds, o, cfg.tol)
        witness["multiplier"] = {"V": _vec(mult.V), "U": _vec(mult.U), "u_o": _r(mult.u_o), "objective": _r(mult.objective)}
    else:
        witness["weights_in"] = _vec(r.weights_in)
        witness["weights_out"] = _vec(r.weights_out)
    return {
        "dmu": ds.dmus[o].name,
        "model": cfg.model,
        "theta_star": None if theta is None else _r(theta),
        "sigma_star": None if sigma is None else _r(sigma),
        "classification": cls,
        "mrs": None,
        "efficient_mrs": None,
        "method": None,
        "witness": witness,
    }


def _route_names(cfg):
    routes = _BCC_ROUTES if cfg.model == "bcc" else _NONRADIAL_ROUTES
    if cfg.method == "all":
        names = [k for k in routes if cfg.oracle or k != "oracle"]
    else:
        names = [cfg.method]
    return [(k, routes[k]) for k in names]


def _run_route(ds, o, cfg, route, score):
    tol = cfg.tol
    if cfg.model == "bcc":
        return mrs.bcc_mrs(ds, o, route, score, tol, cfg.big_M)
    w = _weights(ds, cfg.model)
    if route == mrs.ADDITIVE_MILP:
        return mrs.mrs_additive_milp(ds, o, score, w, tol, cfg.big_M)
    return mrs.additive_oracle_mrs(ds, o, score, w, tol)


def _mrs_record(ds, o, cfg):
    theta, sigma, cls, _ = _score(ds, o, cfg)
    score = theta if cfg.model == "bcc" else sigma
    results = [(label, _run_route(ds, o, cfg, route, score)) for label, route in _route_names(cfg)]
    sets = {label: res.members for label, res in results}
    agreed = len(set(sets.values())) == 1
    first = results[0][1]
    notes = [f"{label}: {n}" for label, res in results for n in res.notes]
    notes += [f"{label}: witness failed verification" for label, res in results if not res.verified]
    if len(results) == 1:
        witness = _witness(ds, first)
        method = results[0][0]
    else:
        witness = {label: _witness(ds, res) for label, res in results}
        method = "all"
    rec = {
        "dmu": ds.dmus[o].name,
        "model": cfg.model,
        "theta_star": None if theta is None else _r(theta),
        "sigma_star": None if sigma is None else _r(sigma),
        "classification": cls,
        "mrs": first.names(ds) if agreed else None,
        "efficient_mrs": None,
        "method": method,
        "witness": witness,
    }
    if notes:
        rec["notes"] = notes
    members = sorted(first.members) if agreed else None
    disagreement = None
    if not agreed:
        disagreement = {label: [ds.dmus[j].name for j in sorted(s)] for label, s in sets.items()}
    return rec, members, disagreement


def _work(args):
    ds, o, cfg = args
    t0 = time.perf_counter()
    if cfg.command == "eval":
        out = (_eval_record(ds, o, cfg), None, None)
    else:
        out = _mrs_record(ds, o, cfg)
    return out, (time.perf_counter() - t0) * 1000.0


# -- commands ---------------------------------------------------------------


def _load(cfg):
    if cfg.input is None:
        return dataset_mod.table1(), "table1 (bundled)"
    return dataset_mod.load_csv(cfg.input), cfg.input


def _selection(ds, cfg):
    if not cfg.dmus:
        return list(range(ds.n))
    out = []
    for name in cfg.dmus:
        try:
            out.append(ds.index(name))
        except KeyError:
            raise UsageError(f"unknown DMU {name!r}") from None
    return out


def _check(cfg):
    if cfg.model not in MODELS:
        raise UsageError(f"unknown model {cfg.model!r}")
    if cfg.method not in METHODS:
        raise UsageError(f"unknown method {cfg.method!r}")
    if cfg.command == "mrs" and cfg.model != "bcc" and cfg.method not in ("all", *_NONRADIAL_ROUTES):
        raise UsageError(f"method {cfg.method} is only defined for the bcc model")
    if cfg.command == "mrs" and cfg.method == "oracle" and not cfg.oracle:
        raise UsageError("--no-oracle contradicts --method oracle")
    if not cfg.big_M > 0:
        raise UsageError("--big-m must be positive")
    if cfg.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    try:
        cfg.tol
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _execute(cfg: RunConfig) -> Report:
    _check(cfg)
    t0 = time.perf_counter()
    ds, source = _load(cfg)
    if cfg.model == "ram":
        dea.ram_weights(ds)  # fail early on a zero range
    picks = _selection(ds, cfg)
    jobs = [(ds, o, cfg) for o in picks]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(jobs))) as pool:
            done = list(pool.map(_work, jobs))
    else:
        done = [_work(j) for j in jobs]

    results, timings, disagreements = [], {}, []
    classes = {}
    for o, ((rec, members, disagreement), ms) in zip(picks, done):
        if members is not None:
            for j in members:
                if j not in classes:
                    classes[j] = dea.bcc_evaluate(ds, j, cfg.tol).classification
            rec["efficient_mrs"] = [ds.dmus[j].name for j in members if classes[j] == dea.BCC_EFFICIENT]
        if disagreement is not None:
            disagreements.append((rec, disagreement))
        results.append(rec)
        timings[rec["dmu"]] = round(ms, 3)

    config = asdict(cfg)
    meta = {"config": config}
    if cfg.timing:
        meta["timing_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
        meta["per_dmu_ms"] = timings
        meta["backend"] = backend()
    info = {
        "source": source,
        "n": ds.n,
        "m": ds.m,
        "s": ds.s,
        "inputs": list(ds.input_labels),
        "outputs": list(ds.output_labels),
        "dmus": list(ds.names),
    }
    return Report(info, results, meta, disagreements)


def cmd_eval(cfg: RunConfig) -> Report:
    cfg.command = "eval"
    return _execute(cfg)


def cmd_mrs(cfg: RunConfig) -> Report:
    cfg.command = "mrs"
    return _execute(cfg)


# -- argument handling --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="DMU CSV file (default: the bundled 7-DMU example)")
    common.add_argument("--model", choices=MODELS, default="bcc")
    common.add_argument("--dmu", metavar="NAME[,NAME...]", help="restrict to these DMUs (default: all)")
    common.add_argument("--eps-pos", type=float, default=1e-7, help="strict positivity threshold")
    common.add_argument("--eps-feas", type=float, default=1e-9, help="feasibility tolerance")
    common.add_argument("--eps-rc", type=float, default=1e-9, help="reduced-cost zero threshold")
    common.add_argument("--eps-obj", type=float, default=1e-9, help="relative slack on fixed optimal values")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-DMU work")
    common.add_argument("--no-timing", action="store_true", help="omit timing from meta")

    parser = argparse.ArgumentParser(prog="dea", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="efficiency scores and classifications")
    p_mrs = sub.add_parser("mrs", parents=[common], help="maximal reference sets")
    p_mrs.add_argument("--method", choices=METHODS, default="all")
    p_mrs.add_argument("--big-m", type=float, default=DEFAULT_BIG_M, help="indicator link constant")
    p_mrs.add_argument("--no-oracle", action="store_true", help="skip the one-LP-per-DMU oracle under --method all")
    return parser


def config_from_args(ns) -> RunConfig:
    dmus = [d.strip() for d in ns.dmu.split(",") if d.strip()] if ns.dmu else None
    return RunConfig(
        command=ns.command,
        input=ns.input,
        model=ns.model,
        method=getattr(ns, "method", "all"),
        dmus=dmus,
        eps_feas=ns.eps_feas,
        eps_pos=ns.eps_pos,
        eps_rc=ns.eps_rc,
        eps_obj=ns.eps_obj,
        big_M=getattr(ns, "big_m", DEFAULT_BIG_M),
        format=ns.format,
        output=ns.output,
        jobs=ns.jobs,
        oracle=not getattr(ns, "no_oracle", False),
        timing=not ns.no_timing,
    )


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    try:
        report = _execute(cfg)
    except (DatasetError, ConfigurationError, UsageError, OSError) as exc:
        print(f"dea: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SolverError as exc:
        print(f"dea: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    text = report.to_json() if cfg.format == "json" else report.to_csv()
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if report.disagreements:
        for rec, sets in report.disagreements:
            print(f"dea: methods disagree for {rec['dmu']}: {json.dumps(sets)}", file=sys.stderr)
            print(f"dea: witnesses for {rec['dmu']}: {json.dumps(rec['witness'])}", file=sys.stderr)
        return EXIT_DISAGREE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
