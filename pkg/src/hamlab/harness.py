"""Seeded Monte Carlo experiment pipelines with CSV/JSON persistence.

Five experiments: expected-count calibration, concentration of the
normalized count, the degree-2 hitting time of the random process, the
two-factor-to-Hamilton conversion pipeline with its double-counting lower
bound, and the matching-pair upper bound. Trials derive per-index seeds
from the config seed, so row content is independent of worker count and
output files are byte-identical across reruns.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .core import (
    BigCount,
    CapacityError,
    FormatError,
    PreconditionError,
    degrees,
    isolated_budget,
)
from .count import (
    ENUMERATION_CAP,
    HAMILTON_DP_CAP,
    MATCHINGS_CAP,
    count_hamilton_cycles,
    count_perfect_matchings,
    count_two_factors,
    double_count_lower_bound,
    expected_hamilton_cycles,
    iter_two_factors,
)
from .generate import (
    Rng,
    derive_seed,
    graph_at,
    random_process,
    sample_gnp,
    two_round_exposure,
)
from .posa import RotationBudget, convert_factor_to_hamilton, find_hamilton_rotation

EXPERIMENT_NAMES = (
    "expected",
    "concentration",
    "hitting",
    "factor-pipeline",
    "matchings",
)
SAMPLE_FACTORS_CAP = 50     # factors converted per pipeline trial
FACTOR_STREAM_CAP = 20_000  # factors the reservoir sampler will inspect


class TrialFailure(RuntimeError):
    """An asserted per-trial property failed; state carries what is needed
    to replay the trial (experiment, n, p, trial index, seed, values)."""

    def __init__(self, message: str, state: dict):
        super().__init__(f"{message}; replay state: {json.dumps(state, sort_keys=True)}")
        self.state = state


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    n_values: tuple[int, ...]
    p_values: tuple[float, ...] = (0.5,)
    trials: int = 1
    seed: int = 0
    caps: dict[str, int] = field(default_factory=dict)
    output_path: str | None = None
    workers: int = 1
    booster_count: int | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise PreconditionError("trials must be >= 1")
        if not self.n_values:
            raise PreconditionError("n_values must be nonempty")
        if any(n < 1 for n in self.n_values):
            raise PreconditionError("n_values must be positive")
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise PreconditionError("p_values must lie in [0, 1]")
        if self.workers < 1:
            raise PreconditionError("workers must be >= 1")
        if self.format not in ("csv", "json"):
            raise PreconditionError(f"format must be csv or json, got {self.format!r}")
        if self.booster_count is not None and self.booster_count < 0:
            raise PreconditionError("booster_count must be nonnegative")

    def cap(self, which: str, default: int) -> int:
        return self.caps.get(which, default)


@dataclass(frozen=True)
class TrialRow:
    """One experiment trial. normalized is recomputable from h and (n, p)
    (None when h = 0); aux holds named scalars (int, float, bool, str)."""

    experiment: str
    n: int
    p: float
    trial_index: int
    seed: int
    h: BigCount
    normalized: float | None
    aux: dict = field(default_factory=dict)


class ExperimentResult(NamedTuple):
    config: ExperimentConfig
    rows: list[TrialRow]
    summary: dict


# --- config file: flat key=value, # comments, strict keys ---------------------

_CONFIG_KEYS = (
    "name", "n_values", "p_values", "trials", "seed", "workers",
    "booster_count", "output_path", "format",
    "cap_hamilton", "cap_enumeration", "cap_matchings",
)


def parse_experiment_config(text: str) -> ExperimentConfig:
    seen: dict[str, str] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise FormatError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise FormatError(f"line {lineno}: duplicate key {key!r}")
        seen[key] = value

    def ints(key: str, raw: str) -> tuple[int, ...]:
        try:
            return tuple(int(tok) for tok in raw.split(",") if tok.strip())
        except ValueError as exc:
            raise FormatError(f"{key}: expected comma-separated integers") from exc

    def floats(key: str, raw: str) -> tuple[float, ...]:
        try:
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        except ValueError as exc:
            raise FormatError(f"{key}: expected comma-separated numbers") from exc

    def one_int(key: str, raw: str) -> int:
        try:
            return int(raw)
        except ValueError as exc:
            raise FormatError(f"{key}: expected an integer, got {raw!r}") from exc

    if "n_values" not in seen:
        raise FormatError("missing required key n_values")
    if "trials" not in seen:
        raise FormatError("missing required key trials")
    name = seen.get("name", "")
    if name and name not in EXPERIMENT_NAMES:
        raise FormatError(f"name must be one of {EXPERIMENT_NAMES}, got {name!r}")
    caps = {}
    for cap_key, store in (
        ("cap_hamilton", "hamilton"),
        ("cap_enumeration", "enumeration"),
        ("cap_matchings", "matchings"),
    ):
        if cap_key in seen:
            caps[store] = one_int(cap_key, seen[cap_key])
    try:
        return ExperimentConfig(
            name=name,
            n_values=ints("n_values", seen["n_values"]),
            p_values=floats("p_values", seen["p_values"]) if "p_values" in seen else (0.5,),
            trials=one_int("trials", seen["trials"]),
            seed=one_int("seed", seen.get("seed", "0")),
            caps=caps,
            output_path=seen.get("output_path"),
            workers=one_int("workers", seen.get("workers", "1")),
            booster_count=(
                one_int("booster_count", seen["booster_count"])
                if "booster_count" in seen else None
            ),
            format=seen.get("format", "csv"),
        )
    except PreconditionError as exc:
        raise FormatError(str(exc)) from exc


def _config_to_dict(cfg: ExperimentConfig) -> dict:
    """Experiment identity only: execution knobs (workers, output path) are
    excluded so files from different runs of the same experiment match."""
    return {
        "name": cfg.name,
        "n_values": list(cfg.n_values),
        "p_values": list(cfg.p_values),
        "trials": cfg.trials,
        "seed": cfg.seed,
        "caps": dict(sorted(cfg.caps.items())),
        "booster_count": cfg.booster_count,
        "format": cfg.format,
    }


# --- shared helpers ------------------------------------------------------------


def _normalized_np(h: BigCount, n: int, p: float) -> float | None:
    """h^(1/n) * e / (np); None when h = 0 or p = 0."""
    if h <= 0 or p <= 0.0:
        return None
    return math.exp(math.log(h) / n) * math.e / (n * p)


def _normalized_ln(h: BigCount, n: int) -> float | None:
    """h^(1/n) * e / ln n; None when h = 0."""
    if h <= 0 or n < 2:
        return None
    return math.exp(math.log(h) / n) * math.e / math.log(n)


def _s_star(n: int) -> float:
    """n / (ln n * sqrt(lnln n)); needs n >= 3 so lnln n > 0."""
    if n < 3:
        raise PreconditionError("cycle-count scale needs n >= 3")
    return n / (math.log(n) * math.sqrt(math.log(math.log(n))))


def _run_grid(
    cfg: ExperimentConfig,
    fn: Callable[[int, float, int, int], TrialRow],
) -> list[TrialRow]:
    """Run fn(n, p, trial, seed) over the config grid; row order and per-trial
    seeds depend only on the grid, never on worker scheduling."""
    tasks = [
        (n, p, t)
        for n in cfg.n_values
        for p in cfg.p_values
        for t in range(cfg.trials)
    ]
    seeds = [derive_seed(cfg.seed, i) for i in range(len(tasks))]
    if cfg.workers == 1:
        return [fn(n, p, t, s) for (n, p, t), s in zip(tasks, seeds)]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(
            pool.map(lambda args: fn(*args[0], args[1]), zip(tasks, seeds))
        )


def _mean_se(values: list[BigCount]) -> tuple[float, float]:
    k = len(values)
    mean = sum(values) / k
    if k < 2:
        return mean, 0.0
    var = sum((float(v) - mean) ** 2 for v in values) / (k - 1)
    return mean, math.sqrt(var / k)


def _median(values: list[float]) -> float:
    ordered = sorted(values)
    k = len(ordered)
    mid = k // 2
    if k % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def _wilson_ci(successes: int, total: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial fraction."""
    if total == 0:
        return 0.0, 1.0
    z = 1.959963984540054
    phat = successes / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = (
        z * math.sqrt(phat * (1.0 - phat) / total + z * z / (4.0 * total * total))
        / denom
    )
    return max(0.0, center - half), min(1.0, center + half)


def _fail(message: str, **state) -> TrialFailure:
    clean = {k: (str(v) if isinstance(v, int) and abs(v) > 2**53 else v)
             for k, v in state.items()}
    return TrialFailure(message, clean)


# --- experiments ---------------------------------------------------------------


def experiment_expected_count(cfg: ExperimentConfig) -> ExperimentResult:
    """Sample mean of the exact Hamilton cycle count against (n-1)! p^n / 2."""
    cap = cfg.cap("hamilton", HAMILTON_DP_CAP)
    for n in cfg.n_values:
        if n > cap:
            raise CapacityError(f"n={n} exceeds Hamilton cap {cap}")

    def one(n: int, p: float, t: int, s: int) -> TrialRow:
        g = sample_gnp(n, p, s)
        h = count_hamilton_cycles(g, cap)
        return TrialRow("expected", n, p, t, s, h, _normalized_np(h, n, p))

    rows = _run_grid(cfg, one)
    return ExperimentResult(cfg, rows, summarize_rows("expected", rows))


def experiment_concentration(cfg: ExperimentConfig) -> ExperimentResult:
    """Distribution of h^(1/n) e/(np); h = 0 trials are counted separately."""
    cap = cfg.cap("hamilton", HAMILTON_DP_CAP)
    for n in cfg.n_values:
        if n > cap:
            raise CapacityError(f"n={n} exceeds Hamilton cap {cap}")

    def one(n: int, p: float, t: int, s: int) -> TrialRow:
        g = sample_gnp(n, p, s)
        h = count_hamilton_cycles(g, cap)
        return TrialRow(
            "concentration", n, p, t, s, h, _normalized_np(h, n, p),
            {"h_positive": h > 0},
        )

    rows = _run_grid(cfg, one)
    return ExperimentResult(cfg, rows, summarize_rows("concentration", rows))


def experiment_hitting_time(cfg: ExperimentConfig) -> ExperimentResult:
    """Exact counts at the degree-2 hitting time of the random process.

    Asserts hitting minimality (minimum degree 2 at tau, below 2 one edge
    earlier) and that the rotation prober agrees with h > 0; either failing
    aborts with the trial's replay state. The row's p is the realized edge
    density at tau; normalized is h^(1/n) e / ln n.
    """
    cap = cfg.cap("hamilton", HAMILTON_DP_CAP)
    for n in cfg.n_values:
        if n > cap:
            raise CapacityError(f"n={n} exceeds Hamilton cap {cap}")
        if n < 3:
            raise PreconditionError("hitting-time experiment needs n >= 3")

    def one(n: int, _p: float, t: int, s: int) -> TrialRow:
        trace = random_process(n, s)
        tau = trace.tau_min_degree_2
        g = graph_at(trace, tau)
        if degrees(g).minimum < 2:
            raise _fail("minimum degree below 2 at its hitting time",
                        experiment="hitting", n=n, trial=t, seed=s, tau=tau)
        if tau > 0 and degrees(graph_at(trace, tau - 1)).minimum >= 2:
            raise _fail("hitting time is not minimal",
                        experiment="hitting", n=n, trial=t, seed=s, tau=tau)
        h = count_hamilton_cycles(g, cap)
        density = 2.0 * tau / (n * (n - 1))
        budget = RotationBudget.from_params(n, max(density, 1.0 / n))
        found = find_hamilton_rotation(g, budget, seed=s)
        if (found is not None) != (h > 0):
            raise _fail("prober disagrees with the exact count",
                        experiment="hitting", n=n, trial=t, seed=s, tau=tau, h=h)
        return TrialRow(
            "hitting", n, density, t, s, h, _normalized_ln(h, n),
            {"tau": tau, "h_positive": h > 0, "prober_found": found is not None},
        )

    # the process has no p parameter: run the n x trials grid once
    grid_cfg = ExperimentConfig(
        name=cfg.name, n_values=cfg.n_values, p_values=(0.0,),
        trials=cfg.trials, seed=cfg.seed, caps=cfg.caps,
        output_path=cfg.output_path, workers=cfg.workers, format=cfg.format,
    )
    rows = _run_grid(grid_cfg, one)
    return ExperimentResult(cfg, rows, summarize_rows("hitting", rows))


def experiment_factor_pipeline(cfg: ExperimentConfig) -> ExperimentResult:
    """Convert sampled almost-2-factors of the first-round graph and check the
    double-counting lower bound against the exact count of the combined graph.

    Per trial: census of almost-2-factors with at most ceil(n/ln^2 n) isolated
    vertices and cycle count capped at the n/(ln n sqrt(lnln n)) scale; up to
    50 reservoir-sampled factors run through the conversion engine. Asserted
    per trial: the bound fed with the actually-converted factor count stays
    at or below the exact count, and the distinct converted cycles do too.
    The full-census bound is reported unasserted with its distance parameter
    k, flagged vacuous when k >= n.
    """
    enum_cap = cfg.cap("enumeration", ENUMERATION_CAP)
    ham_cap = cfg.cap("hamilton", HAMILTON_DP_CAP)
    for n in cfg.n_values:
        if n > enum_cap:
            raise CapacityError(f"n={n} exceeds enumeration cap {enum_cap}")
        if n > ham_cap:
            raise CapacityError(f"n={n} exceeds Hamilton cap {ham_cap}")
        if n < 3:
            raise PreconditionError("factor pipeline needs n >= 3")

    def one(n: int, p: float, t: int, s: int) -> TrialRow:
        max_boosters = cfg.booster_count if cfg.booster_count is not None else n
        base_probe = sample_gnp(n, p, s)
        free = n * (n - 1) // 2 - sum(degrees(base_probe).per_vertex) // 2
        stream = two_round_exposure(n, p, min(max_boosters, free), seed=s)
        g1 = stream.base
        iso = isolated_budget(n)
        s_cap = max(1, math.floor(_s_star(n)))
        census = count_two_factors(g1, allow_isolated=iso, max_cycles=s_cap)
        census_total = census.truncated_total(s_cap)

        rng = Rng(derive_seed(s, 1))
        sample: list = []
        for i, f in enumerate(iter_two_factors(g1, allow_isolated=iso, max_cycles=s_cap)):
            if i >= FACTOR_STREAM_CAP:
                break
            if len(sample) < SAMPLE_FACTORS_CAP:
                sample.append(f)
            else:
                j = rng.below(i + 1)
                if j < SAMPLE_FACTORS_CAP:
                    sample[j] = f

        combined = g1.with_edges(stream.boosters)
        budget = RotationBudget.from_params(n, p if p > 0 else 1.0 / n)
        converted = 0
        distinct: set = set()
        max_hamming = 0
        for f in sample:
            rep = convert_factor_to_hamilton(g1, f, stream, budget)
            if rep.hamilton is None:
                continue
            converted += 1
            distinct.add(rep.hamilton)
            max_hamming = max(max_hamming, rep.hamming)

        h = count_hamilton_cycles(combined, ham_cap)
        maxdeg = degrees(combined).maximum
        np_ = n * p
        if np_ > 1.0:
            k_raw = 17.0 * _s_star(n) * math.log(n) / math.log(np_)
            k_vacuous = k_raw >= n
            k = n if k_vacuous else max(1, math.ceil(k_raw))
        else:
            k, k_vacuous = n, True
        bound_asserted = double_count_lower_bound(converted, n, k, maxdeg)
        bound_full = double_count_lower_bound(census_total, n, k, maxdeg)
        if bound_asserted.value > float(h):
            raise _fail("double-count bound exceeds the exact count",
                        experiment="factor-pipeline", n=n, p=p, trial=t, seed=s,
                        converted=converted, k=k, max_degree=maxdeg,
                        bound=bound_asserted.value, h=h)
        if len(distinct) > h:
            raise _fail("more distinct converted cycles than the exact count",
                        experiment="factor-pipeline", n=n, p=p, trial=t, seed=s,
                        distinct=len(distinct), h=h)
        return TrialRow(
            "factor-pipeline", n, p, t, s, h, _normalized_np(h, n, p),
            {
                "census_total": census_total,
                "sampled": len(sample),
                "converted": converted,
                "success_rate": converted / len(sample) if sample else 0.0,
                "max_hamming": max_hamming,
                "boosters_available": len(stream.boosters),
                "bound_asserted": bound_asserted.value,
                "bound_full_log": bound_full.log,
                "k": k,
                "k_vacuous": k_vacuous,
            },
        )

    rows = _run_grid(cfg, one)
    return ExperimentResult(cfg, rows, summarize_rows("factor-pipeline", rows))


def experiment_matchings(cfg: ExperimentConfig) -> ExperimentResult:
    """Exact h and perfect matching count m with the pairing upper bound.

    h <= C(m, 2) is asserted for even n, where every Hamilton cycle splits
    into two distinct perfect matchings; at odd n no such split exists (C_5
    has h = 1, m = 0) and the row is flagged not applicable.
    """
    ham_cap = cfg.cap("hamilton", HAMILTON_DP_CAP)
    match_cap = cfg.cap("matchings", MATCHINGS_CAP)
    for n in cfg.n_values:
        if n > ham_cap or n > match_cap:
            raise CapacityError(f"n={n} exceeds caps ({ham_cap}, {match_cap})")

    def one(n: int, p: float, t: int, s: int) -> TrialRow:
        g = sample_gnp(n, p, s)
        h = count_hamilton_cycles(g, ham_cap)
        m = count_perfect_matchings(g, match_cap)
        applicable = n % 2 == 0
        if applicable and h > m * (m - 1) // 2:
            raise _fail("count exceeds the matching-pair bound",
                        experiment="matchings", n=n, p=p, trial=t, seed=s,
                        h=h, m=m)
        m_norm = (
            math.exp(2.0 * math.log(m) / n) * math.e / (n * p)
            if m > 0 and p > 0 else None
        )
        aux = {"m": m, "applicable": applicable}
        if m_norm is not None:
            aux["m_normalized"] = m_norm
        return TrialRow("matchings", n, p, t, s, h, _normalized_np(h, n, p), aux)

    rows = _run_grid(cfg, one)
    return ExperimentResult(cfg, rows, summarize_rows("matchings", rows))


_EXPERIMENTS: dict[str, Callable[[ExperimentConfig], ExperimentResult]] = {
    "expected": experiment_expected_count,
    "concentration": experiment_concentration,
    "hitting": experiment_hitting_time,
    "factor-pipeline": experiment_factor_pipeline,
    "matchings": experiment_matchings,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    if cfg.name not in _EXPERIMENTS:
        raise PreconditionError(
            f"unknown experiment {cfg.name!r}; expected one of {EXPERIMENT_NAMES}"
        )
    return _EXPERIMENTS[cfg.name](cfg)


# --- summaries (recomputable from rows alone) ----------------------------------


def summarize_rows(name: str, rows: list[TrialRow]) -> dict:
    """Per-(n, p) group statistics, computed only from row contents so that
    re-reading a results file reproduces the summary exactly. Hitting rows
    group by n alone (their p column is the realized density)."""
    groups: dict[tuple, list[TrialRow]] = {}
    order: list[tuple] = []
    for row in rows:
        key = (row.n,) if name == "hitting" else (row.n, row.p)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)

    out = []
    for key in order:
        grp = groups[key]
        k = len(grp)
        entry: dict = {"n": key[0], "trials": k}
        if name != "hitting":
            entry["p"] = key[1]
        positives = [r for r in grp if r.h > 0]
        norms = [r.normalized for r in positives if r.normalized is not None]

        if name == "expected":
            mean, se = _mean_se([r.h for r in grp])
            expected = expected_hamilton_cycles(key[0], key[1]).value
            entry.update(mean=mean, se=se, expected=expected)
            if se > 0:
                entry["z"] = (mean - expected) / se
            else:
                entry["z"] = 0.0 if mean == expected else math.inf
        elif name == "concentration":
            le_1 = sum(1 for r in grp if r.h == 0 or (r.normalized or 0) <= 1.0)
            le_105 = sum(1 for r in grp if r.h == 0 or (r.normalized or 0) <= 1.05)
            entry.update(
                positive=len(positives),
                frac_positive=len(positives) / k,
                frac_le_1=le_1 / k,
                frac_le_1_05=le_105 / k,
                norm_min=min(norms) if norms else None,
                norm_median=_median(norms) if norms else None,
                norm_max=max(norms) if norms else None,
            )
        elif name == "hitting":
            lo, hi = _wilson_ci(len(positives), k)
            agree = sum(
                1 for r in grp if r.aux.get("prober_found") == (r.h > 0)
            )
            entry.update(
                positive=len(positives),
                frac_positive=len(positives) / k,
                ci_low=lo,
                ci_high=hi,
                prober_agreement=agree / k,
                norm_mean=sum(norms) / len(norms) if norms else None,
            )
        elif name == "factor-pipeline":
            entry.update(
                mean_success_rate=sum(r.aux["success_rate"] for r in grp) / k,
                max_hamming=max(r.aux["max_hamming"] for r in grp),
                bound_ok_fraction=sum(
                    1 for r in grp if r.aux["bound_asserted"] <= float(r.h)
                ) / k,
                k_vacuous_fraction=sum(1 for r in grp if r.aux["k_vacuous"]) / k,
            )
        elif name == "matchings":
            applicable = [r for r in grp if r.aux["applicable"]]
            holds = sum(
                1 for r in applicable
                if r.h <= r.aux["m"] * (r.aux["m"] - 1) // 2
            )
            entry.update(
                applicable=len(applicable),
                holds_fraction=holds / len(applicable) if applicable else None,
                max_m=max((r.aux["m"] for r in grp), default=0),
            )
        else:
            raise PreconditionError(f"unknown experiment {name!r}")
        out.append(entry)
    return {"experiment": name, "groups": out}


# --- persistence ---------------------------------------------------------------


def _scalar_to_text(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    if "," in text or "\n" in text:
        raise FormatError(f"value not CSV-safe: {text!r}")
    return text


def _text_to_scalar(text: str):
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def format_rows_csv(rows: list[TrialRow]) -> str:
    aux_keys = sorted({k for r in rows for k in r.aux})
    header = ["experiment", "n", "p", "trial", "seed", "h", "normalized"]
    header += [f"aux_{k}" for k in aux_keys]
    lines = [",".join(header)]
    for r in rows:
        cells = [
            r.experiment, str(r.n), repr(float(r.p)), str(r.trial_index),
            str(r.seed), str(r.h), _scalar_to_text(r.normalized),
        ]
        cells += [_scalar_to_text(r.aux.get(k)) for k in aux_keys]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _row_to_json(r: TrialRow) -> dict:
    return {
        "experiment": r.experiment,
        "n": r.n,
        "p": r.p,
        "trial": r.trial_index,
        "seed": r.seed,
        "h": str(r.h),
        "normalized": r.normalized,
        "aux": {k: (str(v) if isinstance(v, int) and not isinstance(v, bool)
                    and abs(v) > 2**53 else v)
                for k, v in sorted(r.aux.items())},
    }


def format_results_json(
    rows: list[TrialRow], summary: dict, config: ExperimentConfig | None = None
) -> str:
    doc = {
        "config": _config_to_dict(config) if config is not None else None,
        "rows": [_row_to_json(r) for r in rows],
        "summary": summary,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_results(
    rows: list[TrialRow],
    summary: dict,
    path: str,
    format: str = "csv",
    config: ExperimentConfig | None = None,
) -> None:
    """Single-writer persistence; bytes depend only on rows/summary/config."""
    if format == "csv":
        text = format_rows_csv(rows)
    elif format == "json":
        text = format_results_json(rows, summary, config)
    else:
        raise PreconditionError(f"format must be csv or json, got {format!r}")
    try:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


class ResultsFile(NamedTuple):
    config: dict | None
    rows: list[TrialRow]
    summary: dict | None


def _aux_from_json(aux: dict) -> dict:
    out = {}
    for key, value in aux.items():
        if isinstance(value, str):
            try:
                out[key] = int(value)
                continue
            except ValueError:
                pass
        out[key] = value
    return out


def read_results(path: str) -> ResultsFile:
    """Read either format back; JSON restores config and summary, CSV only
    rows. Scalar aux types are recovered by shape (int, float, bool, text)."""
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        rows = [
            TrialRow(
                experiment=r["experiment"],
                n=r["n"],
                p=r["p"],
                trial_index=r["trial"],
                seed=r["seed"],
                h=int(r["h"]),
                normalized=r["normalized"],
                aux=_aux_from_json(r["aux"]),
            )
            for r in doc["rows"]
        ]
        return ResultsFile(doc.get("config"), rows, doc.get("summary"))

    lines = [ln for ln in text.split("\n") if ln]
    if not lines:
        raise FormatError("empty results file")
    header = lines[0].split(",")
    fixed = ["experiment", "n", "p", "trial", "seed", "h", "normalized"]
    if header[: len(fixed)] != fixed:
        raise FormatError(f"unexpected CSV header {lines[0]!r}")
    aux_keys = [col[4:] for col in header[len(fixed):]]
    if any(not header[len(fixed) + i].startswith("aux_") for i in range(len(aux_keys))):
        raise FormatError("trailing CSV columns must be aux_*")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise FormatError(f"row has {len(cells)} cells, header {len(header)}")
        aux = {}
        for key, cell in zip(aux_keys, cells[len(fixed):]):
            value = _text_to_scalar(cell)
            if value is not None:
                aux[key] = value
        rows.append(
            TrialRow(
                experiment=cells[0],
                n=int(cells[1]),
                p=float(cells[2]),
                trial_index=int(cells[3]),
                seed=int(cells[4]),
                h=int(cells[5]),
                normalized=(
                    None if cells[6] == "" else float(cells[6])
                ),
                aux=aux,
            )
        )
    return ResultsFile(None, rows, None)
