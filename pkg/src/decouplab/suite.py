"""Config-driven check runner.

A config is a JSON object with shared settings (``n``, ``kernel``,
``distribution``, ``norm``, ``grids``, ``seed``, ``replicates``, ``workers``,
``engine``, ``confidence``, ``cap``) and a ``checks`` list.  Each entry is a
check name or an object ``{"check": name, ...}`` whose extra fields override
the shared settings for that check.  ``run_suite`` writes one JSON file per
check plus ``summary.csv`` and returns an exit status derived from the bundle.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import corpus
from .chaos import ChaosForm, hypercontractivity_report, lemma2_check, proposition1_check, LEMMA2_P_THRESHOLD
from .coupling import (
    check_identity_8,
    check_identity_9,
    coupling_law_check,
    decomposition_4_check,
    inequality5_check,
    inequality6_check,
    lemma1_tail_check,
    symmetric_reverse_decomposition_check,
    universal_symmetrization_falsifier,
)
from .graph import PointCloudSpec, graph_demo
from .model import (
    ConstantKernel,
    DistanceKernel,
    FiniteDistribution,
    ModelError,
    NormSpec,
    PolynomialKernel,
    ProductKernel,
    distribution_from_dict,
    kernel_from_dict,
)
from .problab import (
    DEFAULT_OUTCOME_CAP,
    HypothesisError,
    ResourceCapError,
    SCHEMA_VERSION,
    exact_tail,
    find_constant,
    mc_tail,
    params_digest,
    two_sided_comparison,
)
from .ustat import symmetrize_kernel

__all__ = ["ConfigError", "CheckResult", "SuiteResult", "CHECKS", "load_config", "parse_config",
           "run_check", "run_suite", "exit_status", "default_config_text", "resolve_kernel",
           "resolve_distribution"]

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class ConfigError(ValueError):
    """Malformed config; ``line`` and ``path`` locate the problem when known."""

    def __init__(self, message, path=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(f"field {path}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.path = path
        self.line = line


# ---------------------------------------------------------------------------
# shorthand kernels and laws
# ---------------------------------------------------------------------------

_KERNEL_SHORTHAND = {
    "xy": lambda n: ProductKernel(n=n),
    "product": lambda n: ProductKernel(n=n),
    "distance": lambda n: DistanceKernel(n=n),
    "zero": lambda n: ConstantKernel(n=n, value=0),
    "one": lambda n: ConstantKernel(n=n, value=1),
    # f(x, y) = x - y
    "antisymmetric": lambda n: PolynomialKernel(n=n, coef=np.array([[0, -1], [1, 0]])),
}

_DIST_SHORTHAND = {
    "rademacher": lambda: FiniteDistribution.rademacher(1),
    "bernoulli": lambda: FiniteDistribution.rademacher(1),
    "two_atom": lambda: FiniteDistribution.uniform([0, 1]),
    "point": lambda: FiniteDistribution.uniform([0]),
}


def resolve_kernel(spec, n):
    """Kernel from a shorthand name or its JSON object; ``n`` fills a missing size."""
    if isinstance(spec, str):
        if spec not in _KERNEL_SHORTHAND:
            raise ModelError(f"unknown kernel shorthand {spec!r}; expected one of {sorted(_KERNEL_SHORTHAND)}")
        return _KERNEL_SHORTHAND[spec](n)
    if isinstance(spec, dict):
        spec = dict(spec)
        spec.setdefault("n", n)
        base = kernel_from_dict(spec)
        return symmetrize_kernel(base) if spec.get("symmetrize") else base
    raise ModelError("kernel must be a name or an object")


def resolve_distribution(spec):
    if isinstance(spec, str):
        if spec not in _DIST_SHORTHAND:
            raise ModelError(f"unknown distribution shorthand {spec!r}; expected one of {sorted(_DIST_SHORTHAND)}")
        return _DIST_SHORTHAND[spec]()
    return distribution_from_dict(spec)


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    check: str
    status: str  # pass | fail | inconclusive | refused
    detail: str
    payload: dict = field(default_factory=dict)

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "check": self.check, "status": self.status,
                "detail": self.detail, "payload": _jsonable(self.payload)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def _status(ok, inconclusive=False):
    if ok:
        return "pass"
    return "inconclusive" if inconclusive else "fail"


# ---------------------------------------------------------------------------
# check runners: each takes the merged settings dict and returns a CheckResult
# ---------------------------------------------------------------------------

def _norm(s):
    v = s.get("norm", "absolute")
    return NormSpec.parse(v) if isinstance(v, str) else NormSpec(**v)


def _norm_for(s, dim):
    # the absolute value only makes sense on R; vector laws fall back to euclidean
    norm = _norm(s)
    return NormSpec("euclidean") if dim > 1 and norm.kind == "absolute" else norm


def _t_grid(s):
    return (s.get("grids") or {}).get("t")


def _c_grid(s):
    return (s.get("grids") or {}).get("C")


def _kernel(s):
    return resolve_kernel(s.get("kernel", "xy"), int(s.get("n", 3)))


def _dist(s):
    return resolve_distribution(s.get("distribution", "rademacher"))


def _check_identities(s):
    instances = corpus.identity_instances(int(s.get("instances", 1000)), int(s.get("seed", 0)))
    fails8 = fails9 = 0
    first = None
    for kernel, (xi, xti, xj, xtj), i, j in instances:
        for ei, ej in itertools.product((1, -1), repeat=2):
            v = check_identity_8(kernel, xi, xti, xj, xtj, ei, ej, i, j)
            if not v:
                fails8 += 1
                first = first or {"identity": 8, "lhs": v.lhs, "rhs": v.rhs}
        v = check_identity_9(kernel, xi, xti, xj, xtj, i, j)
        if not v:
            fails9 += 1
            first = first or {"identity": 9, "lhs": v.lhs, "rhs": v.rhs}
    ok = fails8 == 0 and fails9 == 0
    return CheckResult("identities", _status(ok),
                       f"{len(instances)} instances, sign identity failures {fails8}, averaged identity failures {fails9}",
                       {"instances": len(instances), "failures_8": fails8, "failures_9": fails9,
                        "first_violation": first})


def _check_coupling_law(s):
    dist = _dist(s)
    sizes = s.get("sizes", [int(s.get("n", 3))])
    rows = []
    for n in sizes:
        r = coupling_law_check(dist, int(n), int(s.get("cap", DEFAULT_OUTCOME_CAP)))
        rows.append({"n": r.n, "atoms": r.atoms, "equal": r.equal})
    ok = all(r["equal"] for r in rows)
    return CheckResult("coupling_law", _status(ok), f"{len(rows)} sizes compared atom by atom", {"rows": rows})


def _check_lemma1(s):
    if "family" in s:
        laws = corpus.small_finite_laws(int(s["family"]), seed=int(s.get("seed", 0)))
    else:
        laws = [_dist(s)]
    rows, bad = [], 0
    for law in laws:
        for r in lemma1_tail_check(law, _norm_for(s, law.dim), _t_grid(s)):
            bad += not r.holds
            if len(laws) == 1 or not r.holds:
                rows.append(r.to_dict())
    return CheckResult("lemma1", _status(bad == 0), f"{len(laws)} laws, {bad} violated grid points",
                       {"laws": len(laws), "violations": bad, "rows": rows})


def _check_falsify(s):
    rep = universal_symmetrization_falsifier(s.get("c_values", list(range(1, 11))))
    return CheckResult("falsify_symmetrization", _status(rep["all_violated"]),
                       f"counterexample found for {sum(w['violated'] for w in rep['witnesses'])} of "
                       f"{len(rep['witnesses'])} constants", rep)


def _check_prop1(s):
    if "a" in s:
        pairs = [(s["a"], _dist(s))]
    else:
        pairs = corpus.mean_zero_scalar_laws(int(s.get("instances", 500)), int(s.get("seed", 0)))
    bad = inconclusive = 0
    rows = []
    for a, law in pairs:
        r = proposition1_check(np.atleast_1d(a), law, _norm_for(s, law.dim))
        if r.status == "fails":
            bad += 1
        elif r.status == "inconclusive":
            inconclusive += 1
        if len(pairs) == 1 or r.status != "holds":
            rows.append({"a": np.atleast_1d(a).tolist(), "lhs": r.lhs, "bound": r.bound,
                         "kappa": r.kappa.value, "status": r.status})
    status = "fail" if bad else ("inconclusive" if inconclusive else "pass")
    return CheckResult("prop1", status, f"{len(pairs)} instances, {bad} failures, {inconclusive} inconclusive",
                       {"instances": len(pairs), "failures": bad, "rows": rows})


def _forms(s):
    if "form" in s:
        f = s["form"]
        return [ChaosForm(np.atleast_1d(f["x"]), np.asarray(f["a"]).reshape(len(f["a"]), -1),
                          np.asarray(f["b"]).reshape(len(f["a"]), len(f["a"]), -1))]
    return corpus.chaos_forms(int(s.get("instances", 1000)), int(s.get("n_max", 12)), int(s.get("seed", 0)))


def _check_lemma2(s):
    forms = _forms(s)
    threshold = Fraction(s.get("threshold", LEMMA2_P_THRESHOLD))
    min_p, bad, rows = Fraction(1), 0, []
    for f in forms:
        r = lemma2_check(f, _norm(s))
        min_p = min(min_p, r.p)
        if r.p < threshold:
            bad += 1
            rows.append({"n": f.n, "p": r.p, "x": f.x, "a": f.a, "b": f.b})
    return CheckResult("lemma2", _status(bad == 0),
                       f"{len(forms)} forms, min p = {min_p}, {bad} below {threshold}",
                       {"instances": len(forms), "min_p": min_p, "measured_c": 1 / min_p if min_p else "inf",
                        "threshold": threshold, "violations": rows})


def _check_chaos_moments(s):
    forms = _forms(s)
    bad_l4 = bad_interp = bad_l1 = 0
    worst = 0.0
    for f in forms:
        h = hypercontractivity_report(f, _norm(s))
        bad_l4 += not h.holds_L4
        bad_l1 += not h.holds_L1
        bad_interp += not h.interpolation_holds
        worst = max(worst, h.L4_over_L2)
    ok = bad_l4 == 0 and bad_interp == 0 and bad_l1 == 0
    return CheckResult("chaos_moments", _status(ok),
                       f"{len(forms)} forms, max L4/L2 = {worst:.4f}, L4 failures {bad_l4}, "
                       f"L2/L1 failures {bad_l1}, interpolation failures {bad_interp}",
                       {"instances": len(forms), "max_L4_over_L2": worst, "failures_L4": bad_l4,
                        "failures_L2_L1": bad_l1, "failures_interpolation": bad_interp})


def _decomposition_runner(name, fn):
    def run(s):
        if "instances" in s:
            kernels = corpus.theorem_kernels(int(s["instances"]), tuple(s.get("sizes", (3, 4))),
                                             int(s.get("seed", 0)))
            if name == "symmetric_reverse":
                kernels = [symmetrize_kernel(k) for k in kernels]
        else:
            kernels = [_kernel(s)]
        dist = _dist(s)
        reports = [fn(k, dist, k.n, _norm(s), _t_grid(s), int(s.get("cap", DEFAULT_OUTCOME_CAP)))
                   for k in kernels]
        ok = all(r.holds for r in reports)
        bad = sum(not r.holds for r in reports)
        payload = reports[0].to_dict() if len(reports) == 1 else {
            "instances": len(reports), "failures": bad,
            "failed": [r.to_dict() for r in reports if not r.holds]}
        return CheckResult(name, _status(ok), f"{len(reports)} instances, {bad} failures", payload)
    return run


def _check_find_constant(s):
    direction = s.get("direction", 1)
    if "instances" in s:
        kernels = corpus.theorem_kernels(int(s["instances"]), tuple(s.get("sizes", (3, 4))), int(s.get("seed", 0)))
        if str(direction) in ("2", "reverse"):
            kernels = [symmetrize_kernel(k) for k in kernels]
    else:
        kernels = [_kernel(s)]
    reports = [find_constant(direction, k, _dist(s), k.n, _norm(s), _t_grid(s), _c_grid(s),
                             s.get("engine", "exact"), int(s.get("replicates", 10**5)), int(s.get("seed", 0)),
                             float(s.get("confidence", 0.95)), int(s.get("workers", 1)),
                             int(s.get("cap", DEFAULT_OUTCOME_CAP))) for k in kernels]
    found = [r.found for r in reports]
    inconclusive = any(r.inconclusive for r in reports)
    cs = [r.C_empirical for r in reports]
    payload = reports[0].to_dict() if len(reports) == 1 else {"instances": len(reports), "C_empirical": cs,
                                                               "max_C": max(cs)}
    payload["note"] = "per-instance constants only lower-bound the universal constant"
    return CheckResult("find_constant", _status(all(found), inconclusive),
                       f"direction {direction}: finite constant on {sum(found)} of {len(found)} instances, "
                       f"max C = {max(cs):.4g}", payload)


def _check_two_sided(s):
    rep = two_sided_comparison(_kernel(s), _dist(s), int(s.get("n", 3)), _norm(s), _t_grid(s),
                               s.get("engine", "exact"), _c_grid(s), int(s.get("replicates", 10**5)),
                               int(s.get("seed", 0)), float(s.get("confidence", 0.95)), int(s.get("workers", 1)),
                               int(s.get("cap", DEFAULT_OUTCOME_CAP)))
    return CheckResult("two_sided", _status(rep.holds, rep.engine == "mc"), f"C2 = {rep.C2}", rep.to_dict())


def _cloud_spec(s):
    cloud = s.get("cloud", {"atoms": [[0], [1]], "n": 3})
    n = int(cloud.get("n", s.get("n", 3)))
    if "atoms" in cloud:
        return PointCloudSpec.atoms(cloud["atoms"], n, cloud.get("probs"))
    if "law" in cloud:
        law = resolve_distribution(cloud["law"])
        return PointCloudSpec(int(cloud.get("N", law.dim)), n, law)
    return PointCloudSpec.uniform_cube(int(cloud.get("N", 3)), n, float(cloud.get("low", 0.0)),
                                       float(cloud.get("high", 1.0)))


def _check_graph_demo(s):
    spec = _cloud_spec(s)
    engine = s.get("engine", "exact") if isinstance(spec.law, FiniteDistribution) else "mc"
    rep = graph_demo(spec, _t_grid(s), engine, int(s.get("replicates", 10**5)),
                     int(s.get("seed", 0)), float(s.get("confidence", 0.95)), int(s.get("workers", 1)),
                     _c_grid(s), int(s.get("cap", DEFAULT_OUTCOME_CAP)))
    return CheckResult("graph_demo", _status(rep.holds, rep.engine == "mc"),
                       f"{rep.engine} engine, N={spec.N}, n={spec.n}, C2 = {rep.C2}", rep.to_dict())


def _check_tails(s):
    stat = s.get("statistic", "coupled")
    kernel, dist, n = _kernel(s), _dist(s), int(s.get("n", 3))
    if s.get("engine", "exact") == "exact":
        curve = exact_tail(stat, kernel, dist, n, _norm(s), _t_grid(s), int(s.get("cap", DEFAULT_OUTCOME_CAP)))
    else:
        curve = mc_tail(stat, kernel, dist, n, _norm(s), _t_grid(s), int(s.get("replicates", 10**5)),
                        int(s.get("seed", 0)), float(s.get("confidence", 0.95)), int(s.get("workers", 1)))
    ok = all(a >= b for a, b in zip(curve.values, curve.values[1:]))
    return CheckResult("tails", _status(ok), f"{curve.mode} tail of {stat} on {len(curve.grid)} points",
                       curve.to_dict())


CHECKS = {
    "identities": _check_identities,
    "coupling_law": _check_coupling_law,
    "lemma1": _check_lemma1,
    "falsify_symmetrization": _check_falsify,
    "prop1": _check_prop1,
    "lemma2": _check_lemma2,
    "chaos_moments": _check_chaos_moments,
    "decomposition4": _decomposition_runner("decomposition4", decomposition_4_check),
    "symmetric_reverse": _decomposition_runner("symmetric_reverse", symmetric_reverse_decomposition_check),
    "inequality5": _decomposition_runner("inequality5", inequality5_check),
    "inequality6": _decomposition_runner("inequality6", inequality6_check),
    "find_constant": _check_find_constant,
    "two_sided": _check_two_sided,
    "graph_demo": _check_graph_demo,
    "tails": _check_tails,
}


def run_check(name: str, settings: dict) -> CheckResult:
    """Run one check; hypothesis violations become failures, cap refusals ``refused``."""
    try:
        result = CHECKS[name](settings)
    except HypothesisError as exc:
        return CheckResult(name, "fail", f"hypothesis violation: {exc}", {"error": "hypothesis", "message": str(exc)})
    except ResourceCapError as exc:
        return CheckResult(name, "refused", str(exc), {"error": "resource_cap", "needed": exc.needed, "cap": exc.cap})
    result.payload.setdefault("params_digest", params_digest(check=name, settings=_jsonable(settings)))
    return result


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

_SHARED_KEYS = {"n", "kernel", "distribution", "norm", "grids", "seed", "replicates", "workers", "engine",
                "confidence", "cap"}
_TOP_KEYS = _SHARED_KEYS | {"checks", "description"}
_INT_KEYS = {"n": 2, "seed": 0, "replicates": 100, "workers": 1, "cap": 1, "instances": 1, "n_max": 1, "family": 1}


def _check_positions(text: str):
    """Character offsets of each entry of the top-level ``checks`` list."""
    start = text.find('"checks"')
    if start < 0:
        return []
    i = text.find("[", start) + 1
    dec = json.JSONDecoder()
    positions = []
    while 0 < i < len(text):
        while i < len(text) and text[i] in " \t\r\n,":
            i += 1
        if i >= len(text) or text[i] == "]":
            break
        positions.append(i)
        try:
            _, i = dec.raw_decode(text, i)
        except json.JSONDecodeError:
            break
    return positions


def _line_of(text: str, path: str):
    """Best-effort line number of the field named by ``path``."""
    if text is None:
        return None
    keys = re.findall(r"[A-Za-z_][A-Za-z0-9_]*", path)
    origin = 0
    m = re.match(r"checks\[(\d+)\]", path)
    if m:
        positions = _check_positions(text)
        idx = int(m.group(1))
        if idx < len(positions):
            origin = positions[idx]
        keys = keys[1:]
    pos = text.find(f'"{keys[-1]}"', origin) if keys else origin
    if pos < 0:
        pos = origin
    return text.count("\n", 0, pos) + 1


def _validate_settings(settings: dict, prefix: str, text):
    for key, lo in _INT_KEYS.items():
        if key in settings:
            v = settings[key]
            if isinstance(v, bool) or not isinstance(v, int) or v < lo:
                raise ConfigError(f"must be an integer >= {lo}, got {v!r}", f"{prefix}{key}", _line_of(text, prefix + key))
    if "engine" in settings and settings["engine"] not in ("exact", "mc"):
        raise ConfigError(f"must be 'exact' or 'mc', got {settings['engine']!r}", f"{prefix}engine",
                          _line_of(text, prefix + "engine"))
    if "confidence" in settings:
        c = settings["confidence"]
        if not isinstance(c, (int, float)) or not 0 < c < 1:
            raise ConfigError(f"must lie in (0, 1), got {c!r}", f"{prefix}confidence", _line_of(text, prefix + "confidence"))
    if "grids" in settings:
        g = settings["grids"]
        if not isinstance(g, dict):
            raise ConfigError("must be an object with optional 't' and 'C' lists", f"{prefix}grids",
                              _line_of(text, prefix + "grids"))
        for name, lo in (("t", 0), ("C", 1)):
            vals = g.get(name)
            if name in g and (not isinstance(vals, list) or not vals
                              or not all(isinstance(v, (int, float)) and v >= lo for v in vals)):
                raise ConfigError(f"must be a non-empty list of numbers >= {lo}", f"{prefix}grids.{name}",
                                  _line_of(text, f"{prefix}grids.{name}"))
    for key, build in (("kernel", lambda v: resolve_kernel(v, int(settings.get("n", 3)))),
                       ("distribution", resolve_distribution),
                       ("norm", lambda v: NormSpec.parse(v) if isinstance(v, str) else NormSpec(**v))):
        if key in settings:
            try:
                build(settings[key])
            except (ModelError, KeyError, TypeError, ValueError) as exc:
                raise ConfigError(str(exc), f"{prefix}{key}", _line_of(text, prefix + key)) from exc


def parse_config(doc, text: str | None = None):
    """Validate a config document; returns ``[(check name, merged settings)]``."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object", line=1)
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key; expected one of {sorted(_TOP_KEYS)}", key, _line_of(text, key))
    shared = {k: v for k, v in doc.items() if k in _SHARED_KEYS}
    _validate_settings(shared, "", text)
    checks = doc.get("checks", [])
    if not isinstance(checks, list):
        raise ConfigError("must be a list", "checks", _line_of(text, "checks"))
    plan = []
    for i, entry in enumerate(checks):
        path = f"checks[{i}]"
        if isinstance(entry, str):
            name, extra = entry, {}
        elif isinstance(entry, dict) and isinstance(entry.get("check"), str):
            name, extra = entry["check"], {k: v for k, v in entry.items() if k != "check"}
        else:
            raise ConfigError("must be a check name or an object with a 'check' field", path, _line_of(text, path))
        if name not in CHECKS:
            raise ConfigError(f"unknown check {name!r}; expected one of {sorted(CHECKS)}", f"{path}.check",
                              _line_of(text, path))
        merged = {**shared, **extra}
        _validate_settings(extra, f"{path}.", text)
        _validate_settings(merged, f"{path}.", text)
        plan.append((name, merged))
    return plan


def load_config(path_or_text):
    """Read and validate a config file (or JSON text); returns the check plan."""
    p = Path(path_or_text) if not str(path_or_text).lstrip().startswith("{") else None
    text = p.read_text() if p is not None else str(path_or_text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc
    return parse_config(doc, text)


def default_config_text() -> str:
    return resources.files("decouplab").joinpath("data/default_suite.json").read_text()


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

@dataclass
class SuiteResult:
    results: list
    exit_code: int
    bundle: Path | None

    def summary_csv(self) -> str:
        return _summary_csv(self.results)


def exit_status(statuses) -> int:
    """0 if every check passed; 3 if a check was refused for size; else 1.

    An inconclusive check (MC intervals too wide to certify) is not a pass.
    """
    statuses = list(statuses)
    if "refused" in statuses:
        return EXIT_CAP
    if "fail" in statuses or "inconclusive" in statuses:
        return EXIT_FAIL
    return EXIT_PASS


def _summary_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "check", "status", "detail"])
    for i, r in enumerate(results):
        w.writerow([i, r.check, r.status, r.detail])
    return buf.getvalue()


def run_suite(config, out_dir=None, echo=None) -> SuiteResult:
    """Run every check of ``config`` in order and write the report bundle.

    ``config`` is a path, JSON text, a parsed dict, or a plan from
    ``parse_config``.  Raises ``ConfigError`` before running anything if the
    config is malformed.
    """
    if isinstance(config, list):
        plan = config
    elif isinstance(config, dict):
        plan = parse_config(config)
    else:
        plan = load_config(config)
    results = []
    for name, settings in plan:
        r = run_check(name, settings)
        results.append(r)
        if echo:
            echo(f"{r.status.upper():13s} {name}: {r.detail}")
    bundle = None
    if out_dir is not None:
        bundle = Path(out_dir)
        bundle.mkdir(parents=True, exist_ok=True)
        for i, r in enumerate(results):
            (bundle / f"{i:02d}_{r.check}.json").write_text(json.dumps(r.to_dict(), sort_keys=True, indent=1))
        (bundle / "summary.csv").write_text(_summary_csv(results))
    return SuiteResult(results, exit_status(r.status for r in results), bundle)

