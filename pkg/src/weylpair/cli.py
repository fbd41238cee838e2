"""Batch command-line surface.

One scenario file drives one run:

    weylpair <command> --scenario file.json [--out dir] [--seed n] [--tol x]

Commands: pspace-enum, pair-build, pair-check, dilate, decompose,
commutant, equiv, counterexample (with sub one of increasing, plateau,
pair, transfer, spec).  The report is printed as JSON on standard output
with sorted keys, so identical scenario and seed give byte-identical
output; artifacts (pair files, heatmaps, witnesses) go to the output
directory.  The exit code is 0 exactly when every declared check passes;
the first failing check is named in the report.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys

import numpy as np

from . import dilation as dila
from . import freeproduct as fp
from . import lattice as lat
from . import pairs as pr
from . import serialize as ser
from .commutant import RepGens, summarize, unitarily_equivalent
from .errors import CheckFailed, ScenarioParseError, WeylPairError

DEFAULT_TOL = 1e-10


def export_heatmap(rows, path: str) -> str:
    """Write (s, t, value) rows as CSV with 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("s,t,value\n")
        for s, t, value in rows:
            fh.write(f"{s:.17g},{t:.17g},{value:.17g}\n")
    return path


def _load_scenario(path: str) -> dict:
    if not os.path.exists(path):
        raise ScenarioParseError(f"scenario file {path} does not exist")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioParseError("scenario must be a JSON object")
    return doc


def _resolve_pair(doc, key):
    """Pair documents may be inline or a path to a pair file."""
    if key not in doc:
        raise ScenarioParseError(f"scenario lacks required field '{key}'")
    val = doc[key]
    if isinstance(val, str):
        if not os.path.exists(val):
            raise ScenarioParseError(f"referenced pair file {val} does not exist")
        with open(val, "r", encoding="utf-8") as fh:
            val = json.load(fh)
    return ser.pair_from_json(val)


def _resolve_family(doc, seed):
    fam_doc = doc.get("family", {"kind": "demo"})
    if isinstance(fam_doc, str):
        if not os.path.exists(fam_doc):
            raise ScenarioParseError(
                f"referenced family file {fam_doc} does not exist")
        with open(fam_doc, "r", encoding="utf-8") as fh:
            return ser.family_from_json(json.load(fh))
    if "P" in fam_doc:
        return ser.family_from_json(fam_doc)
    kind = fam_doc.get("kind", "demo")
    kappa = int(fam_doc.get("kappa", 6))
    if kind == "demo":
        return fp.demo_family(kappa, seed=int(fam_doc.get("seed", seed)))
    if kind == "random":
        return fp.random_family(kappa, int(fam_doc.get("parts_p", kappa)),
                                int(fam_doc.get("parts_q", kappa)),
                                seed=int(fam_doc.get("seed", seed)))
    raise ScenarioParseError(f"unknown family kind {kind!r}")


class _Checks:
    def __init__(self):
        self.items = []

    def add(self, name: str, value: float, tol: float, larger_ok=False):
        ok = value >= tol if larger_ok else value <= tol
        self.items.append({"name": name, "value": float(value),
                           "tol": float(tol), "pass": bool(ok)})

    def first_failure(self):
        for item in self.items:
            if not item["pass"]:
                return item["name"]
        return None


def _window_from(doc) -> lat.LatticeWindow:
    if "window" not in doc:
        raise ScenarioParseError("scenario lacks required field 'window'")
    return ser.window_from_json(doc["window"])


# ---------------------------------------------------------------------------
# command handlers: each returns (data, checks, artifacts)


def _cmd_pspace_enum(doc, out, seed, tol):
    window = _window_from(doc)
    psets = lat.enumerate_pspaces(window)
    data = {"count": len(psets),
            "psets": [ser.pset_to_json(p) for p in psets]}
    return data, _Checks(), []


def _cmd_pair_build(doc, out, seed, tol):
    if "pspace" not in doc:
        raise ScenarioParseError("scenario lacks required field 'pspace'")
    ps = ser.pset_from_json(doc["pspace"])
    k = int(doc.get("k", 1))
    pair = pr.build_pspace_pair(ps, k)
    path = os.path.join(out, doc.get("file", "pair.json"))
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ser.pair_to_json(pair), fh, sort_keys=True, indent=1)
    data = {"dim": pair.dim, "label": pair.label, "file": path}
    return data, _Checks(), [path]


def _cmd_pair_check(doc, out, seed, tol):
    pair = _resolve_pair(doc, "pair")
    margin = int(doc.get("margin", 2))
    safe = pr.SafeRegion(margin)
    checks = _Checks()
    worst_defect = 0.0
    shifts = [a for a in itertools.product(range(margin + 1),
                                           repeat=pair.window.dim)]
    for theta in pr.dual_grid(pair.window):
        for a in shifts:
            worst_defect = max(worst_defect, pr.weyl_defect(pair, theta, a, safe))
    checks.add("weak-weyl-defect", worst_defect, tol)
    worst_iso = max(pr.isometry_defect(pair, a, safe) for a in shifts)
    checks.add("isometry-on-safe-region", worst_iso, tol)
    checks.add("commuting-range-projections",
               pr.check_commuting_ranges(pair), tol)
    return {"dim": pair.dim, "label": pair.label}, checks, []


def _cmd_dilate(doc, out, seed, tol):
    pair = _resolve_pair(doc, "pair")
    depth = int(doc.get("depth", 2))
    bundle = dila.minimal_dilation(pair, depth)
    rep = dila.CovariantRep.from_bundle(bundle)
    checks = _Checks()
    embed = bundle.embed
    checks.add("embed-isometry",
               float(np.linalg.norm(embed.conj().T @ embed - np.eye(pair.dim), 2)),
               1e-12)
    worst = 0.0
    for e in pair.window.generators():
        diff = bundle.w(e) @ embed - embed @ pr.isometry_v(pair, e)
        worst = max(worst, float(np.linalg.norm(diff, 2)))
    checks.add("dilation-extends-isometries", worst, tol)
    cols = [bundle.w(tuple(-c for c in np.array(a))) @ embed
            for a in itertools.product(range(depth + 1), repeat=pair.window.dim)]
    stack = np.hstack(cols)
    u, sv, _ = np.linalg.svd(stack, full_matrices=False)
    span = u[:, sv > 1e-10]
    checks.add("exhaustion-defect",
               float(np.linalg.norm(np.eye(bundle.dim)
                                    - span @ span.conj().T, 2)), tol)
    box = dila.budget_box(bundle)
    worst_mono = 0.0
    worst_comm = 0.0
    pts = sorted(box.points())
    for x in pts:
        ex = rep.e(x)
        for y in pts:
            ey = rep.e(y)
            if all(a <= b for a, b in zip(x, y)):
                lam = np.linalg.eigvalsh(ex - ey)[0]
                worst_mono = max(worst_mono, -float(lam))
            worst_comm = max(worst_comm,
                             float(np.linalg.norm(ex @ ey - ey @ ex, 2)))
    checks.add("family-monotone", worst_mono, tol)
    checks.add("family-commuting", worst_comm, tol)
    path = os.path.join(out, doc.get("file", "bundle.json"))
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ser.bundle_to_json(bundle), fh, sort_keys=True, indent=1)
    data = {"dim": bundle.dim, "depth": depth, "budget": bundle.budget,
            "file": path}
    return data, checks, [path]


def _cmd_decompose(doc, out, seed, tol):
    pair = _resolve_pair(doc, "pair")
    comps = dila.decompose(pair)
    data = {"components": [c.to_json() for c in comps]}
    return data, _Checks(), []


def _cmd_commutant(doc, out, seed, tol):
    if "gens" in doc:
        gens = [ser.matrix_from_json(g) for g in doc["gens"]]
        rep = RepGens(gens[0].shape[0], gens)
    else:
        pair = _resolve_pair(doc, "pair")
        rep = RepGens.from_pair(pair)
    summary = summarize(rep)
    return summary.to_json(), _Checks(), []


def _cmd_equiv(doc, out, seed, tol):
    pa = _resolve_pair(doc, "pair_a")
    pb = _resolve_pair(doc, "pair_b")
    ok, witness = unitarily_equivalent(RepGens.from_pair(pa),
                                       RepGens.from_pair(pb), seed=seed)
    artifacts = []
    if ok:
        path = os.path.join(out, "witness.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(ser.matrix_to_json(witness), fh, sort_keys=True)
        artifacts.append(path)
    return {"equivalent": bool(ok)}, _Checks(), artifacts


def _cmd_counterexample(doc, out, seed, tol):
    sub = doc.get("sub", "increasing")
    family = _resolve_family(doc, seed)
    ev = ser.evaluation_from_json(doc["ev"]) if "ev" in doc \
        else fp.EvaluationPoint.default()
    if "grid" in doc:
        grid = ser.grid_from_json(doc["grid"])
    else:
        # represented pairs grow with the grid; default to integer steps there
        grid = fp.GridSpec(1, 4.0) if sub == "pair" else fp.GridSpec(10, 4.0)
    checks = _Checks()
    artifacts = []
    data = {"sub": sub, "kappa": family.kappa}
    if sub == "increasing":
        violation = fp.check_increasing(family, ev, grid)
        checks.add("field-increasing", violation, 1e-12)
        rows = [(float(s), float(t),
                 float(np.trace(fp.cell_projection(family, ev, s, t)).real))
                for s in grid.values() for t in grid.values()]
        path = os.path.join(out, doc.get("heatmap", "field_rank.csv"))
        export_heatmap(rows, path)
        artifacts.append(path)
    elif sub == "plateau":
        mmax = int(doc.get("mmax", 2))
        nmax = int(doc.get("nmax", 2))
        h = grid.step
        bound = (1 - ev.b) * (1 - ev.d) - 2 * h
        fractions = {}
        for m in range(mmax + 1):
            for n in range(nmax + 1):
                pts = fp.plateau(family, ev, m, n, grid)
                total = sum(1 for s in grid.values() if m <= s < m + 1) * \
                    sum(1 for t in grid.values() if n <= t < n + 1)
                frac = len(pts) / total if total else 0.0
                fractions[f"{m},{n}"] = frac
                checks.add(f"plateau-fraction-{m}-{n}", frac, bound,
                           larger_ok=True)
        data["fractions"] = fractions
    elif sub == "pair":
        pair = fp.build_r2_pair(family, ev, grid)
        data["dim"] = pair.dim
        probe = doc.get("probe", [[1, 0], [0, 1], [2, 0], [0, 2]])
        witness = pr.check_commuting_ranges(pair, [tuple(a) for a in probe])
        data["max_range_commutator"] = float(witness)
        if doc.get("expect_noncommuting", True):
            checks.add("noncommuting-witness", witness, 0.1, larger_ok=True)
        margin = int(doc.get("margin", 1))
        safe = pr.SafeRegion(margin)
        worst = 0.0
        for theta in [np.array([0.3, 0.7]), np.array([1.1, 0.2])]:
            for a in itertools.product(range(margin + 1), repeat=2):
                worst = max(worst, pr.weyl_defect(pair, theta, a, safe))
        checks.add("weak-weyl-defect", worst, tol)
    elif sub == "transfer":
        dim_e, dim_f, equal = fp.commutant_transfer_check(family, ev, grid)
        data.update({"sampled_commutant_dim": dim_e,
                     "family_commutant_dim": dim_f, "equal": bool(equal)})
        checks.add("commutant-transfer", 0.0 if equal else 1.0, 0.5)
    elif sub == "spec":
        support = fp.spec_support(family, ev, grid)
        path = os.path.join(out, doc.get("file", "spec_support.csv"))
        export_heatmap([(s, t, 1.0) for s, t in support], path)
        artifacts.append(path)
        data["support_size"] = len(support)
    else:
        raise ScenarioParseError(f"unknown counterexample sub-command {sub!r}")
    return data, checks, artifacts


_COMMANDS = {
    "pspace-enum": _cmd_pspace_enum,
    "pair-build": _cmd_pair_build,
    "pair-check": _cmd_pair_check,
    "dilate": _cmd_dilate,
    "decompose": _cmd_decompose,
    "commutant": _cmd_commutant,
    "equiv": _cmd_equiv,
    "counterexample": _cmd_counterexample,
}


def run_scenario(command: str, scenario_path: str, out: str = ".",
                 seed: int | None = None, tol: float | None = None) -> tuple[dict, int]:
    """Execute one scenario; returns (report, exit code)."""
    doc = _load_scenario(scenario_path)
    declared = doc.get("command")
    if declared is not None and declared != command:
        raise ScenarioParseError(
            f"scenario declares command {declared!r} but {command!r} was invoked")
    if command not in _COMMANDS:
        raise ScenarioParseError(f"unknown command {command!r}")
    seed = int(doc.get("seed", 0)) if seed is None else int(seed)
    tol = float(doc.get("tol", DEFAULT_TOL)) if tol is None else float(tol)
    if tol <= 0:
        raise ScenarioParseError("tolerance must be positive")
    os.makedirs(out, exist_ok=True)
    data, checks, artifacts = _COMMANDS[command](doc, out, seed, tol)
    failure = checks.first_failure()
    report = {
        "command": command,
        "seed": seed,
        "tol": tol,
        "ok": failure is None,
        "checks": checks.items,
        "data": data,
        "artifacts": sorted(artifacts),
    }
    if failure is not None:
        report["first_failure"] = failure
    return report, (0 if failure is None else 1)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="weylpair",
        description="batch checks for weak Weyl pairs on finite windows")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--scenario", required=True)
    parser.add_argument("--out", default=".")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None)
    args = parser.parse_args(argv)
    try:
        report, code = run_scenario(args.command, args.scenario, args.out,
                                    args.seed, args.tol)
    except ScenarioParseError as exc:
        print(json.dumps({"error": str(exc), "kind": "parse"}, sort_keys=True))
        return 2
    except CheckFailed as exc:
        print(json.dumps({"error": str(exc), "kind": "check"}, sort_keys=True))
        return 1
    except WeylPairError as exc:
        print(json.dumps({"error": str(exc),
                          "kind": type(exc).__name__}, sort_keys=True))
        return 1
    print(json.dumps(report, sort_keys=True, indent=1))
    return code


if __name__ == "__main__":
    sys.exit(main())
