"""Command-line driver: single runs, parameter sweeps and model comparisons.

Usage::

    lgwait [run] --model quantum_exact --omega 1 --sweep omega_t:0:3.14159:64 --out lg.csv
    lgwait compare --config-a quantum.cfg --config-b classical.cfg --out cmp.csv

Exit status is 0 on success, 2 for an invalid configuration and 3 when the
numerics fail (non-finite results).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import detector, hidden, linalg, records, spin
from .errors import LGWaitError, NonFiniteError

MODELS = ("quantum_exact", "quantum_sampled", "classical", "detector_quantum", "detector_classical")
SWEEP_PARAMS = ("omega_t", "lambda")
FORMATS = ("csv", "json")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class SweepSpec:
    param: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMS}, got {self.param!r}")
        if self.steps < 2:
            raise ConfigError("sweep needs at least 2 steps")
        if not self.start < self.stop:
            raise ConfigError("sweep start must be below stop")

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"sweep must look like param:start:stop:steps, got {text!r}")
        name = parts[0].strip().replace("·", "_").replace("*", "_")
        if name in ("wt", "omega_t", "omegat"):
            name = "omega_t"
        try:
            return cls(name, float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError as exc:
            raise ConfigError(f"bad sweep {text!r}: {exc}") from None

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    def __str__(self) -> str:
        return f"{self.param}:{self.start!r}:{self.stop!r}:{self.steps}"


@dataclass(frozen=True)
class RunConfig:
    model: str = "quantum_exact"
    omega: float = 1.0
    lam: float = 0.0
    lambda_err: float = 0.0
    t: float | None = None
    t1: float | None = None
    t2: float | None = None
    t3: float | None = None
    n_runs: int = 100_000
    seed: int = 0
    grid_steps: int = 1000
    output_path: str | None = None
    output_format: str = "csv"
    sweep: SweepSpec | None = None
    workers: int = 1

    def validate(self) -> "RunConfig":
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.output_format!r}")
        for name in ("omega", "lam", "lambda_err"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.omega <= 0:
            raise ConfigError("omega must be > 0")
        if self.lam < 0 or self.lambda_err < 0:
            raise ConfigError("lambda and lambda_err must be >= 0")
        if self.n_runs < 1:
            raise ConfigError("n_runs must be >= 1")
        if self.grid_steps < 1:
            raise ConfigError("grid_steps must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        sweeping_t = self.sweep is not None and self.sweep.param == "omega_t"
        if not sweeping_t:
            self.base_times()
        for lam in self.lambdas():
            self._check_lambda(lam)
        if sweeping_t and self.sweep.start < 0:
            raise ConfigError("omega_t sweep must start at >= 0")
        return self

    def _check_lambda(self, lam: float) -> None:
        if lam < 0:
            raise ConfigError("lambda must be >= 0")
        if self.model in ("quantum_sampled", "detector_quantum", "detector_classical") and lam == 0:
            raise ConfigError("readout requires lambda > 0")
        if self.model == "detector_classical" and 4.0 * lam**2 > 1.0:
            raise ConfigError("detector efficiency 4*lambda^2 exceeds 1")

    def lambdas(self) -> list[float]:
        if self.sweep is not None and self.sweep.param == "lambda":
            return [float(v) for v in self.sweep.values()]
        return [self.lam]

    def base_times(self) -> tuple[float, float, float]:
        if self.t is not None:
            if self.t < 0:
                raise ConfigError("t must be >= 0")
            return (0.0, self.t, 2.0 * self.t)
        ts = (self.t1, self.t2, self.t3)
        if any(v is None for v in ts):
            raise ConfigError("give --t or all of --t1/--t2/--t3 (or an omega_t sweep)")
        if not ts[0] <= ts[1] <= ts[2]:
            raise ConfigError("times must satisfy t1 <= t2 <= t3")
        return ts

    def points(self) -> list[tuple[float, tuple[float, float, float]]]:
        """(lambda, (t1, t2, t3)) for each evaluated point, in sweep order."""
        if self.sweep is None:
            return [(self.lam, self.base_times())]
        if self.sweep.param == "lambda":
            times = self.base_times()
            return [(float(v), times) for v in self.sweep.values()]
        out = []
        for v in self.sweep.values():
            t = float(v) / self.omega
            out.append((self.lam, (0.0, t, 2.0 * t)))
        return out


# config file keys and CLI dests use the RunConfig field names; "lambda" maps to lam
_FIELD_TYPES = {
    "model": str, "omega": float, "lambda": float, "lambda_err": float,
    "t": float, "t1": float, "t2": float, "t3": float,
    "n_runs": int, "seed": int, "grid_steps": int,
    "output_path": str, "output_format": str, "sweep": SweepSpec.parse, "workers": int,
}


def _field_name(key: str) -> str:
    return "lam" if key == "lambda" else key


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[_field_name(key)] = _FIELD_TYPES[key](value)
        except ValueError as exc:
            raise ConfigError(f"config line {lineno}: bad value for {key}: {exc}") from None
    return values


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None


def build_config(file_values: dict, overrides: dict) -> RunConfig:
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    # explicit times on the command line replace a spacing set in the file, and vice versa
    if overrides.get("t") is not None:
        for k in ("t1", "t2", "t3"):
            if overrides.get(k) is None:
                merged.pop(k, None)
    elif any(overrides.get(k) is not None for k in ("t1", "t2", "t3")):
        merged.pop("t", None)
    return RunConfig(**merged).validate()


def _point_seed(seed: int, index: int, slot: int) -> int:
    return int(np.random.SeedSequence([seed, index, slot]).generate_state(1)[0])


def _xi(omega: float, t: float) -> float | None:
    try:
        return spin.sign_change_stats(omega, t).xi
    except LGWaitError:
        return None


def _combine(stat: float, lam_term: float) -> float:
    return math.hypot(stat, lam_term)


def evaluate_point(cfg: RunConfig, index: int, lam: float, times: tuple[float, float, float]) -> records.Record:
    t1, t2, t3 = times
    w = cfg.omega
    intervals = ((t1, t2), (t2, t3), (t1, t3))
    rec = records.Record(model=cfg.model, omega=w, lam=lam, t1=t1, t2=t2, t3=t3, seed=cfg.seed)
    params = spin.ProtocolParams(omega=w, lam=lam)
    step = t2 - t1

    if cfg.model in ("quantum_exact", "detector_quantum"):
        rec.p1 = detector.p1_closed_form(params, step)
        rec.p0 = 1.0 - rec.p1
        rec.p010, rec.p011 = detector.back_action_closed_form(params, step)
        rec.xi = _xi(w, step)
        if cfg.model == "quantum_exact":
            cs = [spin.correlation(w, a, b) for a, b in intervals]
        else:
            p1s = [detector.p1_closed_form(params, b - a) for a, b in intervals]
            cs = [detector.readout_correlation(p, lam) for p in p1s]
            rec.stderr_c12 = abs(detector.readout_lambda_sensitivity(p1s[0], lam)) * cfg.lambda_err

    elif cfg.model == "quantum_sampled":
        psi = linalg.eigenstate("x", +1)
        samples = [
            detector.sample_protocol(params, b - a, psi, cfg.n_runs, _point_seed(cfg.seed, index, k), cfg.workers)
            for k, (a, b) in enumerate(intervals)
        ]
        cs = [s.c12_hat for s in samples]
        rec.p1 = samples[0].n1 / cfg.n_runs
        rec.p0 = samples[0].n0 / cfg.n_runs
        lam_term = abs(detector.readout_lambda_sensitivity(rec.p1, lam)) * cfg.lambda_err
        rec.stderr_c12 = _combine(samples[0].stderr, lam_term)
        rec.n_runs = cfg.n_runs

    elif cfg.model == "classical":
        est = hidden.classical_lg_report(w, times, cfg.n_runs, _point_seed(cfg.seed, index, 0), cfg.workers)
        cs = [est.report.c12, est.report.c23, est.report.c13]
        rec.stderr_c12 = est.corr_stderr[0]
        rec.n_runs = cfg.n_runs

    else:  # detector_classical
        runs = [
            hidden.classical_detector_run(
                w, lam, a, b, cfg.n_runs, _point_seed(cfg.seed, index, k), cfg.grid_steps, cfg.workers
            )
            for k, (a, b) in enumerate(intervals)
        ]
        cs = [r.c12_hat for r in runs]
        rec.p0, rec.p1 = runs[0].p0_hat, runs[0].p1_hat
        lam_term = abs(detector.readout_lambda_sensitivity(rec.p1, lam)) * cfg.lambda_err
        rec.stderr_c12 = _combine(runs[0].c12_stderr, lam_term)
        rec.n_runs = cfg.n_runs

    rec.c12, rec.c23, rec.c13 = (float(c) for c in cs)
    rec.lhs1, rec.lhs2, rec.lhs3, rec.lhs4 = spin.lg_values(*cs, check=False)
    if not rec.finite():
        raise NonFiniteError(f"non-finite result at point {index}")
    return rec


def evaluate(cfg: RunConfig) -> list[records.Record]:
    points = cfg.points()
    if cfg.workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(lambda ip: evaluate_point(cfg, ip[0], *ip[1]), enumerate(points)))
    return [evaluate_point(cfg, i, lam, times) for i, (lam, times) in enumerate(points)]


def _violations(rec: records.Record) -> list[int]:
    return [k + 1 for k, v in enumerate(rec.lhs) if v is not None and v < -spin.VIOLATION_TOL]


def summarize(cfg: RunConfig, recs: Sequence[records.Record]) -> str:
    lines = [f"model={cfg.model} omega={cfg.omega!r} points={len(recs)}"]
    for i, rec in enumerate(recs):
        flags = _violations(rec)
        tag = "LG VIOLATED " + ",".join(map(str, flags)) if flags else "LG ok"
        lines.append(
            f"  [{i}] lambda={rec.lam:.6g} t=({rec.t1:.6g},{rec.t2:.6g},{rec.t3:.6g}) "
            f"C12={rec.c12:.6f} lhs2={rec.lhs2:.6f} {tag}"
        )
    worst = min(recs, key=lambda r: r.lhs2)
    n_viol = sum(1 for r in recs if _violations(r))
    lines.append(
        f"min lhs2={worst.lhs2:.9f} at omega*t={cfg.omega * (worst.t2 - worst.t1):.6f}; "
        f"{n_viol}/{len(recs)} points violate an LG inequality"
    )
    return "\n".join(lines)


def _write(text: str, path: str | None) -> None:
    if path in (None, "", "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def run(cfg: RunConfig) -> list[records.Record]:
    recs = evaluate(cfg)
    _write(records.dumps(recs, cfg.output_format), cfg.output_path)
    print(summarize(cfg, recs), file=sys.stderr)
    return recs


COMPARE_COLUMNS = (
    "index", "t1", "t2", "t3", "lambda",
    "c12_a", "c12_b", "diff_c12",
    "c23_a", "c23_b", "diff_c23",
    "c13_a", "c13_b", "diff_c13",
    "lhs2_a", "lhs2_b", "lg_violated_a", "lg_violated_b",
)


def compare(cfg_a: RunConfig, cfg_b: RunConfig) -> list[dict]:
    """Evaluate two configurations on a shared sweep and join them point by point."""
    if cfg_a.sweep != cfg_b.sweep:
        raise ConfigError(f"incompatible sweeps: {cfg_a.sweep} vs {cfg_b.sweep}")
    pa, pb = cfg_a.points(), cfg_b.points()
    same_grid = len(pa) == len(pb) and all(
        np.allclose(ta, tb, rtol=1e-12, atol=1e-15) for (_, ta), (_, tb) in zip(pa, pb)
    )
    if not same_grid:
        raise ConfigError("incompatible sweeps: the two configurations evaluate different times")
    rows = []
    for i, (ra, rb) in enumerate(zip(evaluate(cfg_a), evaluate(cfg_b))):
        row = {"index": i, "t1": ra.t1, "t2": ra.t2, "t3": ra.t3, "lambda": ra.lam}
        for c in ("c12", "c23", "c13"):
            row[f"{c}_a"] = getattr(ra, c)
            row[f"{c}_b"] = getattr(rb, c)
            row[f"diff_{c}"] = getattr(ra, c) - getattr(rb, c)
        row["lhs2_a"], row["lhs2_b"] = ra.lhs2, rb.lhs2
        row["lg_violated_a"] = int(bool(_violations(ra)))
        row["lg_violated_b"] = int(bool(_violations(rb)))
        rows.append(row)
    return rows


def compare_text(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_COLUMNS)
    for row in rows:
        writer.writerow([records.format_cell(row[c]) for c in COMPARE_COLUMNS])
    return buf.getvalue()


def _add_physics_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--omega", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--lambda-err", dest="lambda_err", type=float,
                   help="uncertainty of lambda, propagated into stderr_c12")
    p.add_argument("--t", type=float, help="equal spacing: times 0, t, 2t")
    p.add_argument("--t1", type=float)
    p.add_argument("--t2", type=float)
    p.add_argument("--t3", type=float)
    p.add_argument("--sweep", type=str, help="param:start:stop:steps with param omega_t or lambda")
    p.add_argument("--runs", dest="n_runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-steps", dest="grid_steps", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", dest="output_path")
    p.add_argument("--format", dest="output_format", choices=FORMATS)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _overrides(ns: argparse.Namespace) -> dict:
    keys = ("model", "omega", "lam", "lambda_err", "t", "t1", "t2", "t3", "n_runs",
            "seed", "grid_steps", "workers", "output_path", "output_format")
    out = {k: getattr(ns, k) for k in keys}
    out["sweep"] = SweepSpec.parse(ns.sweep) if ns.sweep else None
    return out


def _main(argv: list[str]) -> int:
    if argv and argv[0] == "compare":
        p = _Parser(prog="lgwait compare", description="Compare two model runs on a shared sweep.")
        p.add_argument("--config-a", required=True)
        p.add_argument("--config-b", required=True)
        _add_physics_flags(p)
        ns = p.parse_args(argv[1:])
        ov = _overrides(ns)
        out_path, fmt = ov.pop("output_path"), ov.pop("output_format") or "csv"
        cfg_a = build_config(load_config_file(ns.config_a), ov)
        cfg_b = build_config(load_config_file(ns.config_b), ov)
        rows = compare(cfg_a, cfg_b)
        _write(compare_text(rows, fmt), out_path)
        n_a = sum(r["lg_violated_a"] for r in rows)
        n_b = sum(r["lg_violated_b"] for r in rows)
        worst = max(abs(r["diff_c12"]) for r in rows)
        print(
            f"compare {cfg_a.model} vs {cfg_b.model}: {len(rows)} points, max |dC12|={worst:.6g}, "
            f"LG-violating points a={n_a} b={n_b}",
            file=sys.stderr,
        )
        return EXIT_OK

    if argv and argv[0] == "run":
        argv = argv[1:]
    p = _Parser(prog="lgwait", description="Waiting-detector Leggett-Garg simulations.")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    _add_physics_flags(p)
    ns = p.parse_args(argv)
    file_values = load_config_file(ns.config) if ns.config else {}
    cfg = build_config(file_values, _overrides(ns))
    run(cfg)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _main(argv)
    except ConfigError as exc:
        print(f"lgwait: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LGWaitError as exc:
        if isinstance(exc, NonFiniteError):
            print(f"lgwait: numeric failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"lgwait: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        # config problems are ConfigError / LGWaitError above; anything left is the numerics
        print(f"lgwait: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
