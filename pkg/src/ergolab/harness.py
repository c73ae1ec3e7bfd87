"""Config-driven experiment runner.

A run reads a JSON config, executes one pipeline, writes CSV/JSON (and SVG
views of the CSV) into an output directory, and finishes with
``manifest.json``. Everything except the manifest timestamps is a pure
function of the config and the code version, so digests replay exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import jsonschema

from . import __version__
from .bernoulli import BaseSpace, BudgetError, DEFAULT_BUDGET, build_extension, compression_iso, \
    lift_subrelation_iso
from .eqrel import EqRel, check_extension
from .percolation import RNG_ID, edge_labels, interval_for_p, percolate, sweep

MANIFEST = "manifest.json"
KINDS = ("sweep", "interval-probe", "spectral", "entropy-ledger", "coinduce", "extension-suite")

_perm = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}
_prob = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}
_window = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["free", "tree", "grid", "perm"]},
        "rank": {"type": "integer", "minimum": 1},
        "degree": {"type": "integer", "minimum": 2},
        "radius": {"type": "integer", "minimum": 0},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "generators": {"type": "array", "items": _perm, "minItems": 1},
        "base": {"type": "integer", "minimum": 0},
    },
    "allOf": [
        {"if": {"properties": {"type": {"const": "free"}}},
         "then": {"required": ["rank", "radius"]}},
        {"if": {"properties": {"type": {"const": "tree"}}},
         "then": {"required": ["degree", "radius"]}},
        {"if": {"properties": {"type": {"const": "grid"}}}, "then": {"required": ["dims"]}},
        {"if": {"properties": {"type": {"const": "perm"}}}, "then": {"required": ["generators"]}},
    ],
}
_weights = {"type": "array", "items": {"type": ["number", "string"]}, "minItems": 1}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ergolab experiment config",
    "type": "object",
    "required": ["kind", "seeds"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "seeds": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "outputDir": {"type": "string"},
        "plot": {"type": "boolean"},
        "budget": {"type": "integer", "minimum": 1},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "sweep"}}},
         "then": {"required": ["window", "pGrid"], "properties": {
             "window": _window,
             "pGrid": {"oneOf": [
                 {"type": "array", "items": _prob, "minItems": 1},
                 {"type": "object", "required": ["start", "stop", "num"],
                  "properties": {"start": _prob, "stop": _prob,
                                 "num": {"type": "integer", "minimum": 1}}},
             ]},
             "fractionThreshold": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
             "sizeThreshold": {"type": "number", "minimum": 1}}}},
        {"if": {"properties": {"kind": {"const": "interval-probe"}}},
         "then": {"required": ["rank", "radius", "p"], "properties": {
             "rank": {"type": "integer", "minimum": 1},
             "radius": {"type": "integer", "minimum": 1},
             "p": {"oneOf": [_prob, {"type": "array", "items": _prob, "minItems": 1}]},
             "normT": {"type": "number", "exclusiveMinimum": 0},
             "sizeThreshold": {"type": "number", "minimum": 1},
             "many": {"type": "integer", "minimum": 1}}}},
        {"if": {"properties": {"kind": {"const": "spectral"}}},
         "then": {"required": ["window"], "properties": {
             "window": _window,
             "radii": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
             "normOracle": {"type": "number", "minimum": 0},
             "samples": {"type": "integer", "minimum": 0}}}},
        {"if": {"properties": {"kind": {"const": "entropy-ledger"}}},
         "then": {"properties": {
             "alpha": {"type": "object", "properties": {
                 "n": {"type": "integer", "minimum": 3},
                 "generators": {"type": "array", "items": _perm, "minItems": 1},
                 "wordLengthCap": {"type": "integer", "minimum": 1}}},
             "direct": {"type": "array", "items": {
                 "type": "object", "required": ["weights"],
                 "properties": {"label": {"type": "string"}, "weights": _weights}}},
             "subrelations": {"type": "array", "items": {
                 "type": "object", "required": ["beta", "index"],
                 "properties": {"beta": {"type": "number", "minimum": 0},
                                "index": {"oneOf": [{"type": "integer", "minimum": 1},
                                                    {"const": "inf"}]}}}},
             "restrictions": {"type": "array", "items": {
                 "type": "object", "required": ["beta", "muY"],
                 "properties": {"beta": {"type": "number", "minimum": 0},
                                "muY": {"type": ["number", "string"]}}}},
             "thm5": {"type": "object", "required": ["n", "m"], "properties": {
                 "n": {"type": "integer", "minimum": 3},
                 "m": {"type": "array", "items": {"type": "integer", "minimum": 1}}}}}}},
        {"if": {"properties": {"kind": {"const": "coinduce"}}},
         "then": {"properties": {
             "instance": {"type": "object", "required": ["group", "orbitsPerClass", "classes",
                                                         "alphaImages"], "properties": {
                 "group": {"type": "array", "items": _perm, "minItems": 1},
                 "orbitsPerClass": {"type": "integer", "minimum": 1},
                 "classes": {"type": "integer", "minimum": 1},
                 "alphaImages": {"type": "array", "items": _perm, "minItems": 1},
                 "yWeights": _weights}},
             "order": {"enum": ["equivariant", "sorted", "reverse"]},
             "maxPoints": {"type": "integer", "minimum": 1}}}},
        {"if": {"properties": {"kind": {"const": "extension-suite"}}},
         "then": {"properties": {
             "maxPoints": {"type": "integer", "minimum": 1, "maximum": 16},
             "maxK": {"type": "integer", "minimum": 1, "maximum": 4},
             "maxExtPoints": {"type": "integer", "minimum": 1}}}},
    ],
}


class ConfigError(ValueError):
    """Schema violation; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate_config(cfg) -> dict:
    """Raise :class:`ConfigError` with the deepest offending field path."""
    v = jsonschema.Draft202012Validator(SCHEMA)
    errors = list(v.iter_errors(cfg))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        while err.context:
            err = jsonschema.exceptions.best_match(err.context)
        raise ConfigError(_json_path(err.absolute_path), err.message)
    return cfg


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON ({exc})") from None
    return validate_config(cfg)


# ------------------------------------------------------------------ output

def fmt(v) -> str:
    """Fixed CSV formatting: 12 significant digits, '.' decimal, empty for None."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (float, Fraction)):
        x = float(v)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".12g")
    return str(v)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


@dataclass
class RunManifest:
    config_sha256: str
    code_version: str
    kind: str
    config: dict
    started: str
    seed_offset: int = 0
    finished: str = ""
    seed_ledger: list = field(default_factory=list)
    files: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"configSha256": self.config_sha256, "codeVersion": self.code_version,
                "kind": self.kind, "config": self.config, "seedOffset": self.seed_offset,
                "rngId": RNG_ID,
                "startedAt": self.started, "finishedAt": self.finished,
                "seedLedger": self.seed_ledger, "files": self.files}


class _Writer:
    """Collects outputs in canonical order; only this object touches the disk."""

    def __init__(self, out: Path):
        self.out = out
        self.names = []

    def csv(self, name: str, header, rows) -> Path:
        path = self.out / name
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(header)
            for r in rows:
                wr.writerow([fmt(v) for v in r])
        self.names.append(name)
        return path

    def json(self, name: str, doc) -> Path:
        path = self.out / name
        with open(path, "w", newline="\n") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1, default=_json_default)
            fh.write("\n")
        self.names.append(name)
        return path

    def svg(self, name: str, plotter, csv_path: Path) -> None:
        plotter(csv_path, self.out / name)
        self.names.append(name)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def config_digest(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("ERGOLAB_THREADS")
    return max(1, int(env)) if env else 1


# --------------------------------------------------------------- pipelines

def _p_grid(spec) -> list:
    if isinstance(spec, list):
        return sorted(float(p) for p in spec)
    a, b, n = float(spec["start"]), float(spec["stop"]), int(spec["num"])
    if n == 1:
        return [a]
    return [round(a + (b - a) * i / (n - 1), 12) for i in range(n)]


def _run_sweep(cfg, seeds, wr: _Writer, threads: int, ledger: list):
    from .plotting import plot_sweep_summary
    from .windows import build_window

    w = build_window(cfg["window"])
    grid = _p_grid(cfg["pGrid"])
    rep = sweep(w, grid, seeds, cfg.get("fractionThreshold", 0.05), cfg.get("sizeThreshold"),
                threads=threads)
    ledger.extend({"task": "sweep", "seed": s} for s in seeds)
    wr.csv("sweep.csv", ("p", "seed", "largestFrac", "bigClusters", "spanning"),
           [(r.p, r.seed, r.largest_frac, r.big_clusters, r.spanning) for r in rep.rows])
    summ = wr.csv("summary.csv", ("p", "meanLargestFrac", "meanBigClusters", "spanProb"),
                  zip(rep.p_grid, rep.mean_largest_frac, rep.mean_big_clusters, rep.span_prob))
    wr.json("sweep.json", {"window": w.name, "vertices": w.n_vertices, "edges": len(w.edges),
                           "pcHat": rep.pc_hat, "fractionThreshold": rep.fraction_threshold,
                           "sizeThreshold": rep.size_threshold, "monotone": rep.monotone})
    if cfg.get("plot", True):
        wr.svg("sweep.svg", plot_sweep_summary, summ)
    return rep


def _run_interval_probe(cfg, seeds, wr: _Writer, threads: int, ledger: list):
    from .plotting import plot_probe
    from .spectral import tree_norm
    from .windows import tree_ball

    r = int(cfg["rank"])
    norm_t = float(cfg.get("normT", tree_norm(2 * r)))
    iv = interval_for_p(r, norm_t)
    ps = cfg["p"] if isinstance(cfg["p"], list) else [cfg["p"]]
    s = float(cfg.get("sizeThreshold", 1000))
    many = int(cfg.get("many", 10))
    w = tree_ball(2 * r, int(cfg["radius"]), free_rank=r)
    rows = []
    for p in ps:
        for seed in seeds:
            part = percolate(w, edge_labels(w, seed), p)
            big = part.big_clusters(s)
            rows.append((p, seed, len(big), part.largest()))
            ledger.append({"task": f"probe p={fmt(p)}", "seed": seed})
    probe = wr.csv("probe.csv", ("p", "seed", "bigClusters", "largest"), rows)
    summary = []
    for p in ps:
        cs = [row[2] for row in rows if row[0] == p]
        summary.append({"p": p, "inInterval": p in iv, "meanBigClusters": sum(cs) / len(cs),
                        "fractionWithMany": sum(c >= many for c in cs) / len(cs),
                        "fractionWithNone": sum(c == 0 for c in cs) / len(cs)})
    wr.json("interval.json", {"n": r, "normT": norm_t, "lo": iv.lo, "hi": iv.hi, "empty": iv.is_empty,
                              "vertices": w.n_vertices, "sizeThreshold": s, "many": many,
                              "probes": summary})
    if cfg.get("plot", True):
        wr.svg("probe.svg", plot_probe, probe)
    return summary


def _run_spectral(cfg, seeds, wr: _Writer, threads: int, ledger: list):
    from .plotting import plot_spectrum
    from .spectral import iso_bound_check, tree_norm, window_norm
    from .windows import build_window

    spec = dict(cfg["window"])
    radii = cfg.get("radii") or [spec.get("radius")]
    samples = int(cfg.get("samples", 200))
    rows = []
    for radius in radii:
        if radius is not None:
            spec["radius"] = radius
        w = build_window(spec)
        if "normOracle" in cfg:
            oracle = float(cfg["normOracle"])
        elif spec["type"] in ("free", "tree"):
            oracle = tree_norm(w.degree)
        else:
            oracle = float(w.degree)  # no gap asserted
        est = window_norm(w)
        rep = iso_bound_check(w, oracle, samples, seeds[0]) if w.interior.any() else None
        ledger.append({"task": f"iso radius={w.radius}", "seed": seeds[0]})
        rows.append((w.radius, w.n_vertices, len(w.edges), est.value, oracle,
                     rep.min_ratio if rep else None, rep.bound if rep else None,
                     rep.passed if rep else None))
    path = wr.csv("spectrum.csv", ("radius", "vertices", "edges", "windowNorm", "normOracle",
                                   "isoUpperBound", "isoLowerBound", "boundHolds"), rows)
    if cfg.get("plot", True) and all(r[5] is not None for r in rows):
        wr.svg("spectrum.svg", plot_spectrum, path)
    return rows


def _weights_of(spec) -> tuple:
    return tuple(Fraction(str(x)) for x in spec)


def _run_entropy(cfg, seeds, wr: _Writer, threads: int, ledger: list):
    from .entropy import (BetaLedger, alpha_search, direct_witness, lem2_bound, lem3_bound,
                          lem4_bound, shannon_entropy, thm5_schedule)
    from .spectral import Graphing

    bl = BetaLedger()
    notes = {}
    a = cfg.get("alpha")
    if a is not None:
        if "n" in a:
            bl.add(lem2_bound(int(a["n"])))
        else:
            g = Graphing.from_perms([tuple(p) for p in a["generators"]])
            est = alpha_search(g, int(a.get("wordLengthCap", 3)), seed=seeds[0])
            ledger.append({"task": "alpha_search", "seed": seeds[0]})
            if hasattr(est, "n"):
                bl.add(lem2_bound(est))
                notes["alpha"] = {"n": est.n, "norm": est.achieved_norm, "wordLength": est.word_length}
            else:
                notes["alpha"] = {"notFound": est.reason, "bestNorm": est.best_norm}
    for d in cfg.get("direct", []):
        wts = _weights_of(d["weights"])
        h = shannon_entropy(BaseSpace(tuple(range(len(wts))), wts)).nats
        bl.add(direct_witness(h, d.get("label", "base")))
    for s in cfg.get("subrelations", []):
        idx = math.inf if s["index"] == "inf" else int(s["index"])
        bl.add(lem3_bound(float(s["beta"]), idx))
    for r in cfg.get("restrictions", []):
        bl.add(lem4_bound(float(r["beta"]), Fraction(str(r["muY"]))))
    t = cfg.get("thm5")
    if t is not None:
        for m in t["m"]:
            bl.add(thm5_schedule(int(t["n"]), int(m)))
    wr.csv("ledger.csv", ("rule", "value", "chain", "note"),
           [(e.rule, e.value, " <- ".join(e.chain), e.note) for e in bl.entries])
    wr.json("ledger.json", {"entries": [e.to_dict() for e in bl.entries],
                            "bound": None if math.isinf(bl.bound) else bl.bound, **notes})
    return bl


def _run_coinduce(cfg, seeds, wr: _Writer, threads: int, ledger: list):
    from .coinduction import build_choice_system, coinduce, verify_cind_props, verify_cocycles
    from .groups import FiniteGroup, GroupAction
    from .instances import free_action, random_coinduction_instance

    budget = int(cfg.get("budget", DEFAULT_BUDGET))
    order = cfg.get("order", "equivariant")
    instances = []
    inst = cfg.get("instance")
    if inst is not None:
        group = FiniteGroup([tuple(g) for g in inst["group"]])
        N, k = int(inst["orbitsPerClass"]), int(inst["classes"])
        beta = free_action(group, N * k)
        m = len(group)
        classes = [list(range(c * N * m, (c + 1) * N * m)) for c in range(k)]
        rel = EqRel.from_classes([Fraction(1, beta.n_points)] * beta.n_points, classes)
        alpha = GroupAction(group, [tuple(p) for p in inst["alphaImages"]])
        yw = (_weights_of(inst["yWeights"]) if "yWeights" in inst
              else (Fraction(1, alpha.n_points),) * alpha.n_points)
        instances.append((None, rel, beta, alpha, yw))
    else:
        for s in seeds:
            I = random_coinduction_instance(s, max_x=int(cfg.get("maxPoints", 24)))
            instances.append((s, I.rel, I.beta, I.alpha, I.y_weights))
    rows = []
    for seed, rel, beta, alpha, yw in instances:
        cs = build_choice_system(rel, beta, order)
        coc = verify_cocycles(cs)
        cr = coinduce(cs, alpha, yw, budget)
        rep = verify_cind_props(cr)
        if seed is not None:
            ledger.append({"task": "coinduce", "seed": seed})
        else:
            wr.json("choice.json", json.loads(cs.to_json()))
            wr.json("coinduced.json", json.loads(cr.to_json()))
        rows.append((seed, rel.n, cs.N, cr.rel.n, len(cr.rel.classes), bool(coc),
                     rep.extension_ok, rep.expansion_containment_ok, rep.injectivity_failure))
    wr.csv("coinduce.csv", ("seed", "points", "N", "coinducedPoints", "coinducedClasses",
                            "cocycleOk", "extensionOk", "containmentOk", "injectivityFailure"), rows)
    return rows


def _run_extension_suite(cfg, seeds, wr: _Writer, threads: int, ledger: list):
    from .instances import random_extension_instance

    budget = int(cfg.get("budget", DEFAULT_BUDGET))
    rows = []
    for s in seeds:
        I = random_extension_instance(s, int(cfg.get("maxPoints", 12)), int(cfg.get("maxK", 3)),
                                      int(cfg.get("maxExtPoints", 20_000)))
        ext = build_extension(I.rel, I.base, budget)
        rep = check_extension(ext.extension_map())
        lift = lift_subrelation_iso(I.rel, I.sub, I.base, budget=budget)
        comp = compression_iso(I.rel, I.Y, I.base, I.isos, budget=budget)
        ledger.append({"task": "extension", "seed": s})
        rows.append((s, I.rel.n, len(I.rel.classes), len(I.base.symbols), ext.rel.n,
                     rep.is_extension, I.index, bool(lift.report), comp.ledger["mu_Y"],
                     bool(comp.report), comp.ledger["entropy_factor"] == comp.ledger["entropy_factor_predicted"]))
    wr.csv("extensions.csv", ("seed", "points", "classes", "k", "extensionPoints", "isExtension",
                              "index", "liftIso", "muY", "compressionIso", "entropyFactorExact"), rows)
    return rows


PIPELINES = {
    "sweep": _run_sweep,
    "interval-probe": _run_interval_probe,
    "spectral": _run_spectral,
    "entropy-ledger": _run_entropy,
    "coinduce": _run_coinduce,
    "extension-suite": _run_extension_suite,
}


@dataclass
class RunResult:
    manifest: RunManifest
    out: Path
    result: object = None


def run(cfg: dict, out=None, threads: int | None = None, seed_offset: int = 0) -> RunResult:
    """Validate ``cfg``, execute its pipeline and write the manifest.

    Raises
    ------
    ConfigError
        Schema violation or missing output directory.
    BudgetError
        A finite model would exceed its point budget.
    """
    validate_config(cfg)
    out = out if out is not None else cfg.get("outputDir")
    if out is None:
        raise ConfigError("$.outputDir", "no output directory (give --out or outputDir)")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) + int(seed_offset) for s in cfg["seeds"]]
    man = RunManifest(config_digest(cfg), __version__, cfg["kind"], cfg, _now(), int(seed_offset))
    wr = _Writer(out)
    result = PIPELINES[cfg["kind"]](cfg, seeds, wr, resolve_threads(threads), man.seed_ledger)
    man.files = {name: sha256_file(out / name) for name in wr.names}
    man.finished = _now()
    with open(out / MANIFEST, "w", newline="\n") as fh:
        json.dump(man.to_dict(), fh, sort_keys=True, indent=1)
        fh.write("\n")
    return RunResult(man, out, result)


@dataclass
class ReplayReport:
    passed: bool
    mismatches: list  # (file, reason)

    def __bool__(self):
        return self.passed


def replay_check(out_dir, rerun: bool = False) -> ReplayReport:
    """Recompute digests of a finished run; with ``rerun`` also re-execute its config."""
    out = Path(out_dir)
    mpath = out / MANIFEST
    if not out.is_dir() or not mpath.is_file():
        return ReplayReport(False, [(str(mpath), "missing")])
    with open(mpath) as fh:
        man = json.load(fh)
    bad = []
    for name, digest in sorted(man["files"].items()):
        p = out / name
        if not p.is_file():
            bad.append((name, "missing"))
        elif sha256_file(p) != digest:
            bad.append((name, "digest mismatch"))
    if rerun and not bad:
        with tempfile.TemporaryDirectory() as tmp:
            again = run(man["config"], tmp, seed_offset=man.get("seedOffset", 0))
            for name, digest in sorted(man["files"].items()):
                if again.manifest.files.get(name) != digest:
                    bad.append((name, "rerun differs"))
    return ReplayReport(not bad, bad)


__all__ = ["SCHEMA", "KINDS", "ConfigError", "BudgetError", "RunManifest", "RunResult",
           "ReplayReport", "validate_config", "load_config", "run", "replay_check", "fmt"]
