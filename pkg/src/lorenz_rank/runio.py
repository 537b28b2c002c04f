"""File formats and run configuration.

Every output file starts with a comment line carrying the tool version and
the effective configuration, so artifacts are self-describing. Floats are
serialized in decimal with 17 significant digits, which round-trips IEEE
doubles exactly; loaders skip leading comment lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .model import Assignment, PreferenceMatrix, RankingPolicy
from .optimizer import ConvergenceTrace, OptimizerConfig
from .harness import ConvergenceComparison, SweepRecord


class ConfigError(ValueError):
    """Raised for malformed run configurations and input files (exit code 2)."""


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _comment_line(meta: dict | None = None) -> str:
    payload = json.dumps(meta or {}, sort_keys=True)
    return f"# lorenz-rank {__version__} config={payload}"


# -- run configuration --------------------------------------------------------

_CONFIG_KEYS = {
    "T": int,
    "K": int,
    "lambda": float,
    "user_weights": str,
    "item_weights": str,
    "objective": str,
    "variant": str,
    "beta0": (float, type(None)),
    "alpha1": float,
    "alpha2": float,
    "reciprocal": bool,
    "side_lambda": float,
    "seed": int,
    "trace_every": int,
    "quantiles": list,
}

_REQUIRED_KEYS = ("T", "K")


@dataclass(frozen=True)
class RunConfig:
    """Optimizer configuration plus harness options parsed from JSON."""

    optimizer: OptimizerConfig
    quantiles: tuple[float, ...] = (0.25, 0.5)

    def to_dict(self) -> dict:
        out = {
            "T": self.optimizer.T,
            "K": self.optimizer.K,
            "lambda": self.optimizer.lam,
            "user_weights": self.optimizer.user_weights,
            "item_weights": self.optimizer.item_weights,
            "objective": self.optimizer.objective,
            "variant": self.optimizer.variant,
            "beta0": self.optimizer.beta0,
            "alpha1": self.optimizer.alpha1,
            "alpha2": self.optimizer.alpha2,
            "reciprocal": self.optimizer.reciprocal,
            "side_lambda": self.optimizer.side_lambda,
            "seed": self.optimizer.seed,
            "trace_every": self.optimizer.trace_every,
            "quantiles": list(self.quantiles),
        }
        return out


def parse_run_config(data: dict) -> RunConfig:
    """Validate a config mapping; unknown keys and bad values name the key."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for key in data:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
    for key in _REQUIRED_KEYS:
        if key not in data:
            raise ConfigError(f"missing config key {key!r}")
    clean = {}
    for key, value in data.items():
        expected = _CONFIG_KEYS[key]
        allowed = expected if isinstance(expected, tuple) else (expected,)
        if float in allowed and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if int in allowed and isinstance(value, bool):
            raise ConfigError(f"config key {key!r} must be an integer")
        if not isinstance(value, allowed):
            raise ConfigError(f"config key {key!r} has the wrong type")
        clean[key] = value
    quantiles = clean.pop("quantiles", [0.25, 0.5])
    try:
        quantiles = tuple(float(q) for q in quantiles)
    except (TypeError, ValueError) as exc:
        raise ConfigError("config key 'quantiles' must be a list of numbers") from exc
    if any(not (0.0 < q <= 1.0) for q in quantiles):
        raise ConfigError("config key 'quantiles' entries must lie in (0, 1]")
    if "lambda" in clean:
        clean["lam"] = clean.pop("lambda")
    try:
        optimizer = OptimizerConfig(**clean)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    return RunConfig(optimizer=optimizer, quantiles=quantiles)


def load_run_config(path: str | Path) -> RunConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_run_config(data)


# -- preference matrices -------------------------------------------------------

def load_prefs(path: str | Path) -> PreferenceMatrix:
    """Read a dense or sparse-triplet preference file."""
    lines = Path(path).read_text().splitlines()
    idx = 0
    dense_dims = None
    while idx < len(lines) and lines[idx].lstrip().startswith("#"):
        stripped = lines[idx].lstrip("# ").split()
        if len(stripped) == 3 and stripped[0] == "dense":
            try:
                dense_dims = (int(stripped[1]), int(stripped[2]))
            except ValueError as exc:
                raise ConfigError(f"{path}:{idx + 1}: malformed dense header") from exc
        idx += 1
    if dense_dims is not None:
        return _load_dense(path, lines, idx, dense_dims)
    return _load_sparse(path, lines, idx)


def _build_prefs(path, values) -> PreferenceMatrix:
    try:
        return PreferenceMatrix(values)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _check_cell(path, lineno, row, col, value) -> float:
    if not np.isfinite(value) or value < 0.0 or value > 1.0:
        raise ConfigError(
            f"{path}:{lineno}: value {value!r} at cell ({row}, {col}) outside [0, 1]")
    return value


def _load_dense(path, lines, idx, dims) -> PreferenceMatrix:
    n, m = dims
    values = np.zeros((n, m))
    for i in range(n):
        lineno = idx + i + 1
        if idx + i >= len(lines):
            raise ConfigError(f"{path}:{lineno}: expected {n} data rows")
        parts = lines[idx + i].split(",")
        if len(parts) != m:
            raise ConfigError(f"{path}:{lineno}: expected {m} columns, got {len(parts)}")
        for j, token in enumerate(parts):
            try:
                value = float(token)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad float {token!r}") from exc
            values[i, j] = _check_cell(path, lineno, i + 1, j + 1, value)
    return _build_prefs(path, values)


def _load_sparse(path, lines, idx) -> PreferenceMatrix:
    if idx >= len(lines) or lines[idx].strip() != "user,item,value":
        raise ConfigError(f"{path}:{idx + 1}: expected sparse header 'user,item,value'")
    triples = []
    seen = set()
    for offset, line in enumerate(lines[idx + 1:]):
        lineno = idx + offset + 2
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ConfigError(f"{path}:{lineno}: expected 'user,item,value'")
        try:
            user, item, value = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: malformed row {line!r}") from exc
        if user < 1 or item < 1:
            raise ConfigError(f"{path}:{lineno}: indices are 1-based positive")
        if (user, item) in seen:
            raise ConfigError(f"{path}:{lineno}: duplicate entry ({user}, {item})")
        seen.add((user, item))
        _check_cell(path, lineno, user, item, value)
        triples.append((user, item, value))
    if not triples:
        raise ConfigError(f"{path}: no entries in sparse file")
    n = max(t[0] for t in triples)
    m = max(t[1] for t in triples)
    values = np.zeros((n, m))
    for user, item, value in triples:
        values[user - 1, item - 1] = value
    return _build_prefs(path, values)


def write_prefs(path: str | Path, prefs: PreferenceMatrix, meta: dict | None = None):
    lines = [_comment_line(meta), f"# dense {prefs.n} {prefs.m}"]
    for row in prefs.values:
        lines.append(",".join(fmt_float(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


# -- policies ------------------------------------------------------------------

def write_policy(path: str | Path, policy: RankingPolicy, meta: dict | None = None):
    """Policy JSON (1-based item ids) preceded by the version comment line."""
    parts = [_comment_line(meta) + "\n"]
    parts.append('{"n": %d, "m": %d, "K": %d, "components": [' %
                 (policy.n, policy.m, policy.K))
    chunks = []
    for coeff, assignment in zip(policy.coefficients, policy.assignments):
        rows = ",".join(
            "[" + ",".join(str(int(j) + 1) for j in row) + "]"
            for row in assignment.items)
        chunks.append('{"coefficient": %s, "assignments": [%s]}' %
                      (fmt_float(coeff), rows))
    parts.append(",".join(chunks))
    parts.append("]}\n")
    Path(path).write_text("".join(parts))


def load_policy(path: str | Path) -> RankingPolicy:
    lines = Path(path).read_text().splitlines()
    body = "\n".join(line for line in lines if not line.lstrip().startswith("#"))
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"policy file {path} is not valid JSON: {exc}") from exc
    try:
        m = int(data["m"])
        components = data["components"]
        coeffs = [float(c["coefficient"]) for c in components]
        assignments = tuple(
            Assignment(items=np.asarray(c["assignments"], dtype=np.int64) - 1, m=m)
            for c in components)
        return RankingPolicy(coefficients=np.asarray(coeffs),
                             assignments=assignments)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"policy file {path} has a malformed field: {exc}") from exc


# -- traces and sweeps ---------------------------------------------------------

def write_trace(path: str | Path, trace: ConvergenceTrace, meta: dict | None = None):
    lines = [_comment_line(meta), "t,beta,objective,wall_ms"]
    for t, beta, obj, wall in zip(trace.ts, trace.betas, trace.objectives, trace.wall_ms):
        lines.append(f"{t},{fmt_float(beta)},{fmt_float(obj)},{fmt_float(wall)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_sweep(path: str | Path, records: list[SweepRecord],
                meta: dict | None = None):
    if not records:
        raise ConfigError("cannot write an empty sweep")
    quantiles = [q for q, _ in records[0].quantile_utilities]
    qcols = ",".join(f"qcum_{q:.2f}" for q in quantiles)
    header = ("lambda,objective_kind,weights_user,weights_item,total_utility,"
              f"gini_exposure,{qcols},final_objective,iters,seed")
    lines = [_comment_line(meta), header]
    for rec in records:
        qvals = ",".join(fmt_float(value) for _, value in rec.quantile_utilities)
        lines.append(
            f"{fmt_float(rec.lam)},{rec.objective_kind},{rec.weights_user},"
            f"{rec.weights_item},{fmt_float(rec.total_utility)},"
            f"{fmt_float(rec.gini_exposure)},{qvals},"
            f"{fmt_float(rec.final_objective)},{rec.iterations},{rec.seed}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_comparison(path: str | Path, comparison: ConvergenceComparison,
                     meta: dict | None = None):
    """Aligned comparison CSV: a (beta, objective) column pair per beta0."""
    sub = comparison.subgradient
    header = ["t", "obj_subgradient"]
    for beta0, _ in comparison.smoothing:
        header.append(f"beta_{beta0:g}")
        header.append(f"obj_smoothing_{beta0:g}")
    lines = [_comment_line(meta), ",".join(header)]
    for row, t in enumerate(sub.ts):
        cells = [str(t), fmt_float(sub.objectives[row])]
        for _, trace in comparison.smoothing:
            cells.append(fmt_float(trace.betas[row]))
            cells.append(fmt_float(trace.objectives[row]))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def load_vector(path: str | Path) -> np.ndarray:
    """Comma- or newline-separated floats (used by the projection subcommand)."""
    tokens = []
    for line in Path(path).read_text().splitlines():
        if line.lstrip().startswith("#"):
            continue
        tokens.extend(t for t in line.replace(",", " ").split() if t)
    try:
        return np.asarray([float(t) for t in tokens])
    except ValueError as exc:
        raise ConfigError(f"{path}: expected a vector of floats") from exc
