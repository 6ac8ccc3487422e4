"""Command-line interface.

Exit codes: 0 on success, 2 when an input violates an invariant (the
message names it), 3 when a computation would exceed a capacity budget.
Reports go to ``--out`` or stdout, as JSON (validated against the bundled
schema) or CSV. Infinite values are written as the string ``"inf"``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from importlib import resources

import numpy as np

from .channels import make_rng, random_classical, random_cq
from .complexity import (
    Bound,
    BoundReport,
    lambda_star,
    qc_asymmetric_bounds,
    qc_mary_bounds,
    qc_precise_bounds,
    qc_symmetric_bounds,
    sc_state_bounds,
)
from .errors import CapacityError, ChanqueryError, DomainError, ValidationError
from .instances import Instance, load_instance
from .oracle import (
    exact_nstar_asymmetric,
    exact_nstar_asymmetric_channel,
    exact_nstar_product_channel,
    exact_nstar_states,
)

SCHEMA_VERSION = 1
BOUND_COLUMNS = ["instance_id", "bound_name", "value", "direction", "method", "applicable", "reason"]
SANDWICH_COLUMNS = ["instance_id", "lower", "oracle_nstar", "upper", "sandwich_ok"]
COMMANDS = (
    "bounds-symmetric",
    "bounds-asymmetric",
    "bounds-mary",
    "sc-states",
    "oracle-nstar",
    "verify-sandwich",
    "sweep",
)


class _Timer:
    def __init__(self):
        self.stages: dict[str, float] = {}

    def run(self, stage: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        self.stages[stage] = self.stages.get(stage, 0.0) + time.perf_counter() - t0
        return out


# ---------------------------------------------------------------------------
# JSON encoding


def encode(obj):
    """Make a report JSON-safe: infinities become strings, numpy scalars become Python."""
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist())
    return obj


def load_schema() -> dict:
    text = resources.files("chanquery").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


def validate_report(doc: dict):
    import jsonschema

    jsonschema.validate(doc, load_schema())


# ---------------------------------------------------------------------------
# parameter resolution


def _param(args, inst: Instance | None, name: str, required: bool = True):
    val = getattr(args, name, None)
    if val is None and inst is not None:
        val = getattr(inst, name)
    if val is None and required:
        raise ValidationError(f"{name} given by flag or instance file")
    if val is not None and not 0 < val < 1:
        raise ValidationError(f"{name} in (0, 1)", str(val))
    return val


def _prior(args, inst: Instance) -> float:
    p = getattr(args, "p", None)
    if p is None and inst.p is not None:
        p = inst.p
    if p is None and inst.priors is not None and len(inst.priors) == 2:
        p = inst.priors[0]
    if p is None:
        p = 0.5
    if not 0 < p < 1:
        raise ValidationError("p in (0, 1)", str(p))
    return p


def _pair(inst: Instance):
    if len(inst.channels) != 2:
        raise ValidationError("exactly two channels", f"got {len(inst.channels)}")
    return inst.channels


def _merge(*reports: BoundReport) -> BoundReport:
    out = BoundReport()
    seen = set()
    for rep in reports:
        out.inputs_echo.update(rep.inputs_echo)
        out.divergence_values.update(rep.divergence_values)
        out.verdict = out.verdict or rep.verdict
        for b in rep.lower + rep.upper:
            key = (b.name, b.side)
            if key in seen:
                continue
            seen.add(key)
            (out.lower if b.side == "lower" else out.upper).append(b)
    return out


def symmetric_report(p: float, N, M, eps: float) -> BoundReport:
    """Symmetric bounds plus the factor-four pair when its hypotheses hold."""
    rep = qc_symmetric_bounds(p, N, M, eps)
    if p <= 0.5 and eps < p / 64:
        rep = _merge(rep, qc_precise_bounds(p, N, M, eps))
    else:
        reason = "needs p <= 1/2 and eps < p/64"
        rep.lower.append(Bound("lambda-lower", "lower", 0.0, applicable=False, reason=reason))
        rep.upper.append(Bound("lambda-upper", "upper", math.inf, applicable=False, reason=reason))
    return rep


# ---------------------------------------------------------------------------
# commands


def cmd_bounds_symmetric(args, inst, timer):
    N, M = _pair(inst)
    p = _prior(args, inst)
    eps = _param(args, inst, "eps")
    rep = timer.run("bounds", symmetric_report, p, N, M, eps)
    return {"report": rep.to_dict()}, [("0", rep)]


def cmd_bounds_asymmetric(args, inst, timer):
    N, M = _pair(inst)
    eps = _param(args, inst, "eps")
    delta = _param(args, inst, "delta")
    rep = timer.run("bounds", qc_asymmetric_bounds, N, M, eps, delta)
    return {"report": rep.to_dict()}, [("0", rep)]


def cmd_bounds_mary(args, inst, timer):
    if len(inst.channels) < 2:
        raise ValidationError("at least two channels", f"got {len(inst.channels)}")
    m = len(inst.channels)
    priors = inst.priors if inst.priors is not None else [1.0 / m] * m
    if len(priors) != m:
        raise ValidationError("one prior per channel", f"{len(priors)} priors, {m} channels")
    eps = _param(args, inst, "eps")
    rep = timer.run("bounds", qc_mary_bounds, list(zip(priors, inst.channels)), eps)
    return {"report": rep.to_dict()}, [("0", rep)]


def cmd_sc_states(args, inst, timer):
    if len(inst.states) != 2:
        raise ValidationError("exactly two states", f"got {len(inst.states)}")
    p = _prior(args, inst)
    eps = _param(args, inst, "eps")
    rep = timer.run("bounds", sc_state_bounds, p, inst.states[0], inst.states[1], eps)
    return {"report": rep.to_dict()}, [("0", rep)]


def _oracle(args, inst: Instance):
    delta = _param(args, inst, "delta", required=False)
    eps = _param(args, inst, "eps")
    if inst.states:
        if len(inst.states) != 2:
            raise ValidationError("exactly two states", f"got {len(inst.states)}")
        rho, sigma = inst.states
        if delta is not None:
            return exact_nstar_asymmetric(rho, sigma, eps, delta, n_max=args.n_max)
        return exact_nstar_states(_prior(args, inst), rho, sigma, eps, n_max=args.n_max)
    N, M = _pair(inst)
    if delta is not None:
        return exact_nstar_asymmetric_channel(N, M, eps, delta, n_max=args.n_max, seed=args.seed)
    return exact_nstar_product_channel(_prior(args, inst), N, M, eps, n_max=args.n_max, seed=args.seed)


def cmd_oracle_nstar(args, inst, timer):
    res = timer.run("oracle", _oracle, args, inst)
    doc = res.to_dict()
    doc["details"] = res.details
    return {"oracle": doc}, []


def _random_pair(kind: str, seed: int, index: int):
    rng = make_rng([seed, index])
    if kind == "classical":
        return random_classical(2, rng), random_classical(2, rng)
    if kind == "cq":
        return random_cq(3, 2, rng), random_cq(3, 2, rng)
    raise ValidationError("sandwich instance kind in {classical, cq}", repr(kind))


def _sandwich_row(task):
    kind, seed, index, p, eps, n_max = task
    N, M = _random_pair(kind, seed, index)
    rep = symmetric_report(p, N, M, eps)
    res = exact_nstar_product_channel(p, N, M, eps, n_max=n_max, seed=seed)
    lower, upper, n_star = rep.best_lower, rep.best_upper, res.n_star
    ok = bool(lower <= n_star <= upper) if res.finite else bool(math.isinf(upper))
    return {
        "instance_id": f"{kind}-{seed}-{index}",
        "lower": lower,
        "oracle_nstar": n_star,
        "upper": upper,
        "sandwich_ok": ok,
    }


def cmd_verify_sandwich(args, inst, timer):
    if args.count < 1:
        raise ValidationError("count >= 1", str(args.count))
    p = args.p if args.p is not None else 0.5
    eps = args.eps if args.eps is not None else 1e-3
    for name, val in (("p", p), ("eps", eps)):
        if not 0 < val < 1:
            raise ValidationError(f"{name} in (0, 1)", str(val))
    tasks = [(args.kind, args.seed, i, p, eps, args.n_max) for i in range(args.count)]
    t0 = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sandwich_row, tasks))
    else:
        rows = [_sandwich_row(t) for t in tasks]
    timer.stages["verify"] = time.perf_counter() - t0
    return {"rows": rows, "all_ok": all(r["sandwich_ok"] for r in rows)}, None


def _parse_values(text: str | None) -> list[float]:
    if not text:
        raise ValidationError("grid of at least 2 points", "no --values given")
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError("numeric grid values", str(exc)) from None
    if len(vals) < 2:
        raise ValidationError("grid of at least 2 points", f"got {len(vals)}")
    return vals


def cmd_sweep(args, inst, timer):
    values = _parse_values(args.values)
    rows_out = []
    for val in values:
        if args.grid == "eps":
            p, eps = _prior(args, inst), val
        else:
            p = val
            eps = args.eps if args.eps is not None else p / 100
        if not (0 < p < 1 and 0 < eps < 1):
            raise ValidationError("grid point in (0, 1)", f"p={p}, eps={eps}")
        if inst.states:
            rep = timer.run("bounds", sc_state_bounds, p, inst.states[0], inst.states[1], eps)
        else:
            N, M = _pair(inst)
            rep = timer.run("bounds", symmetric_report, p, N, M, eps)
        if p <= 0.5 and eps < p:
            lam = lambda_star(p, eps)
            rep.lower.append(Bound("lambda-star", "parameter", lam, method="lambda-star"))
        rows_out.append((args.grid, val, rep))
    rows = [
        dict(_bound_row(str(i), b), grid_param=g, grid_value=v)
        for i, (g, v, rep) in enumerate(rows_out)
        for b in rep.lower + rep.upper
    ]
    return {"rows": rows}, None


HANDLERS = {
    "bounds-symmetric": cmd_bounds_symmetric,
    "bounds-asymmetric": cmd_bounds_asymmetric,
    "bounds-mary": cmd_bounds_mary,
    "sc-states": cmd_sc_states,
    "oracle-nstar": cmd_oracle_nstar,
    "verify-sandwich": cmd_verify_sandwich,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# output


def _bound_row(instance_id: str, b: Bound) -> dict:
    return {
        "instance_id": instance_id,
        "bound_name": b.name,
        "value": b.value,
        "direction": b.side,
        "method": b.method,
        "applicable": b.applicable,
        "reason": b.reason,
    }


def _csv_value(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _csv_value(r.get(k, "")) for k in columns})
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chanquery", description="Channel discrimination query-complexity bounds")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--instance", help="instance JSON file")
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--n-max", dest="n_max", type=int, default=None)
    ap.add_argument("--eps", type=float)
    ap.add_argument("--delta", type=float)
    ap.add_argument("--p", type=float)
    ap.add_argument("--no-timestamp", action="store_true", help="omit timestamp and timings for byte-identical output")
    ap.add_argument("--count", type=int, default=20, help="verify-sandwich: number of random instances")
    ap.add_argument("--kind", default="classical", help="verify-sandwich: classical or cq")
    ap.add_argument("--grid", choices=("eps", "p"), default="eps", help="sweep: grid parameter")
    ap.add_argument("--values", help="sweep: comma-separated grid values")
    return ap


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    timer = _Timer()
    try:
        needs_instance = args.command != "verify-sandwich"
        if needs_instance and not args.instance:
            raise ValidationError("--instance given", f"required by {args.command}")
        inst = timer.run("parse", load_instance, args.instance) if args.instance else None
        payload, bound_reports = HANDLERS[args.command](args, inst, timer)
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return 3
    except ChanqueryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.format == "csv":
        if args.command == "verify-sandwich":
            text = to_csv(payload["rows"], SANDWICH_COLUMNS)
        elif args.command == "sweep":
            text = to_csv(payload["rows"], BOUND_COLUMNS + ["grid_param", "grid_value"])
        elif args.command == "oracle-nstar":
            o = payload["oracle"]
            text = to_csv([o], ["n_star", "n_max", "n_max_reached", "method", "error_at_n_star"])
        else:
            rows = [_bound_row(iid, b) for iid, rep in bound_reports for b in rep.lower + rep.upper]
            text = to_csv(rows, BOUND_COLUMNS)
    else:
        doc = {"schema_version": SCHEMA_VERSION, "command": args.command, "seed": args.seed}
        keys = ["instance", "eps", "delta", "p", "n_max"]
        keys += {"verify-sandwich": ["count", "kind"], "sweep": ["grid", "values"]}.get(args.command, [])
        doc["inputs"] = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
        doc.update(payload)
        if not args.no_timestamp:
            doc["timestamp"] = datetime.now(timezone.utc).isoformat()
            doc["timings"] = timer.stages
        doc = encode(doc)
        validate_report(doc)
        text = json.dumps(doc, indent=2) + "\n"

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
