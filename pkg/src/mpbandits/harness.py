"""Experiment harness: configuration, Monte Carlo execution, CSV emission,
slope fits, and small statistical utilities used by the verification suites.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field, fields

import numpy as np

from .adversaries import AdaptiveProp1, AdversarySpec
from .channel import run_pair_collision_wrapped
from .codec import PrgStream, RandomShared
from .env import (
    LossSequence,
    MODEL_COLLISION_INFO,
    MODEL_COLLISION_ORACLE,
    MODEL_NO_INFO,
    MODELS,
    RegretReport,
    compute_regret,
)
from .errors import ConfigurationError
from .multiplayer import integer_mth_root, nearest_valid_horizon
from .pair_collision import run_pair_collision_oracle
from .pair_no_collision import run_no_collision
from .rng import derive_seed


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

_SCHEMA: dict[str, tuple[type, object, str]] = {
    "model": (str, MODEL_COLLISION_ORACLE, "collision_info | collision_info_oracle | no_info"),
    "m": (int, 2, "number of players"),
    "K": (int, 3, "number of arms"),
    "T": (list, [10000], "horizon, or comma list for scaling runs"),
    "adversary": (str, "stochastic", "stochastic | scripted | remark | adaptive"),
    "means": (list, [0.1, 0.5, 0.9], "per-arm Bernoulli means (stochastic)"),
    "loss_file": (str, "", "loss CSV path (scripted)"),
    "reps": (int, 10, "independent repetitions, seeds base+0..base+reps-1"),
    "seed": (int, 1, "base seed"),
    "out": (str, "", "output CSV path (empty = stdout only)"),
    "shared": (str, "random", "shared-uniform source for the pair: random | prg"),
    "eta_scale": (float, 1.0, "learning-rate override factor for the pair strategy"),
    "R": (int, 0, "block-count override for the no-info pair (0 = floor(sqrt(T)))"),
    "explore_rate": (float, 0.0, "exploration override for the no-info pair (0 = default)"),
    "diagnostics": (bool, False, "record per-round invariant margins (pair strategy)"),
}


@dataclass
class ExperimentConfig:
    model: str = MODEL_COLLISION_ORACLE
    m: int = 2
    K: int = 3
    T: list[int] = field(default_factory=lambda: [10000])
    adversary: str = "stochastic"
    means: list[float] = field(default_factory=lambda: [0.1, 0.5, 0.9])
    loss_file: str = ""
    reps: int = 10
    seed: int = 1
    out: str = ""
    shared: str = "random"
    eta_scale: float = 1.0
    R: int = 0
    explore_rate: float = 0.0
    diagnostics: bool = False

    def adversary_spec(self) -> AdversarySpec:
        kind = "adaptive_prop1" if self.adversary == "adaptive" else self.adversary
        return AdversarySpec(kind=kind, means=tuple(self.means), path=self.loss_file)

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigurationError(f"model must be one of {MODELS}")
        if self.reps < 1 or self.seed < 0:
            raise ConfigurationError("need reps >= 1 and seed >= 0")
        if self.m < 2:
            raise ConfigurationError("need at least two players")
        if self.m > self.K:
            raise ConfigurationError("need m <= K distinct arms")
        if self.model in (MODEL_COLLISION_INFO, MODEL_COLLISION_ORACLE) and self.m != 2:
            raise ConfigurationError(
                "the collision-information strategy is two-player only"
            )
        if self.adversary == "adaptive":
            if self.K != 3:
                raise ConfigurationError("the adaptive threshold adversary needs K=3")
            if self.m != 2:
                raise ConfigurationError("the adaptive adversary drives two players")
            if self.model == MODEL_COLLISION_INFO:
                raise ConfigurationError(
                    "adaptive runs use the instant-communication pair or the "
                    "no-information pair"
                )
        if self.adversary == "stochastic" and len(self.means) != self.K:
            raise ConfigurationError("means must have length K")
        for t in self.T:
            if self.model == MODEL_NO_INFO and self.m == 2 and t < self.K**2:
                raise ConfigurationError(
                    f"T={t} < K^2={self.K ** 2} for the no-information pair"
                )
            if self.model == MODEL_NO_INFO and self.m > 2:
                if integer_mth_root(t, self.m) is None:
                    raise ConfigurationError(
                        f"T={t} is not a perfect {self.m}-th power; nearest valid "
                        f"is {nearest_valid_horizon(t, self.m)}"
                    )
                if t < self.K**self.m:
                    raise ConfigurationError(
                        f"T={t} < K^m={self.K ** self.m} for {self.m} players"
                    )
        # validates kind-specific parameters
        self.adversary_spec()


def parse_config_text(text: str) -> ExperimentConfig:
    """Flat key=value format, '#' comments, one key per line."""
    values: dict[str, object] = {}
    for ln_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {ln_no}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigurationError(f"line {ln_no}: unknown key {key!r}")
        values[key] = _coerce(key, val)
    return ExperimentConfig(**values)


def _coerce(key: str, val: str):
    typ = _SCHEMA[key][0]
    if typ is bool:
        if val.lower() in ("1", "true", "yes", "on"):
            return True
        if val.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"{key}: expected a boolean, got {val!r}")
    if typ is int:
        return int(val)
    if typ is float:
        return float(val)
    if typ is list:
        parts = [p for p in val.split(",") if p.strip()]
        if key == "T":
            return [int(p) for p in parts]
        return [float(p) for p in parts]
    return val


def schema_text() -> str:
    lines = ["# experiment config schema (key = default  -- help)"]
    for key, (typ, default, help_) in _SCHEMA.items():
        shown = ",".join(str(x) for x in default) if isinstance(default, list) else default
        lines.append(f"{key} = {shown}  # ({typ.__name__}) {help_}")
    return "\n".join(lines) + "\n"


def config_echo(cfg: ExperimentConfig) -> str:
    parts = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        parts.append(f"{f.name}=" + (",".join(str(x) for x in v) if isinstance(v, list) else str(v)))
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

@dataclass
class Aggregate:
    T: int
    reports: list[RegretReport]

    @property
    def mean_regret(self) -> float:
        return float(np.mean([r.regret for r in self.reports]))

    @property
    def stderr_regret(self) -> float:
        if len(self.reports) < 2:
            return 0.0
        return float(np.std([r.regret for r in self.reports], ddof=1)
                     / math.sqrt(len(self.reports)))

    def mean_of(self, attr: str) -> float:
        return float(np.mean([getattr(r, attr) for r in self.reports]))


def run_single(cfg: ExperimentConfig, T: int, rep: int) -> RegretReport:
    """One game at horizon T with seed cfg.seed + rep."""
    seed = cfg.seed + rep
    spec = cfg.adversary_spec()
    eta = None
    if cfg.eta_scale != 1.0:
        eta = cfg.eta_scale * 2.0**-7 * cfg.K**-1.5 / math.sqrt(T)

    if spec.is_adaptive():
        adversary = AdaptiveProp1()
        if cfg.model == MODEL_COLLISION_ORACLE:
            transcript, _, realized = run_pair_collision_oracle(
                K=cfg.K, T=T, seed=seed, eta=eta, adaptive=adversary,
                shared=_shared_stream(cfg, seed),
            )
        else:
            transcript, _, realized = run_no_collision(
                None, seed, R=cfg.R or None,
                explore_rate=cfg.explore_rate or None,
                adaptive=adversary, K=cfg.K, T=T,
            )
        return compute_regret(transcript, realized)

    seq = spec.table(cfg.K, T, seed)
    if cfg.model == MODEL_COLLISION_ORACLE:
        transcript, _, _ = run_pair_collision_oracle(
            seq, seed=seed, eta=eta, diagnostics=cfg.diagnostics,
            shared=_shared_stream(cfg, seed),
        )
    elif cfg.model == MODEL_COLLISION_INFO:
        transcript = run_pair_collision_wrapped(seq, seed, eta=eta).transcript
    elif cfg.m == 2:
        transcript, _, _ = run_no_collision(
            seq, seed, R=cfg.R or None, explore_rate=cfg.explore_rate or None
        )
    else:
        from .multiplayer import run_multiplayer

        transcript, _ = run_multiplayer(seq, cfg.m, seed)
    return compute_regret(transcript, seq)


def _shared_stream(cfg: ExperimentConfig, seed: int):
    if cfg.shared == "prg":
        return PrgStream(derive_seed(seed, "prgseed") & ((1 << 64) - 1))
    if cfg.shared == "random":
        return RandomShared(seed)
    raise ConfigurationError("shared must be 'random' or 'prg'")


def run_experiment(cfg: ExperimentConfig) -> list[Aggregate]:
    """All repetitions at every horizon; aggregation is order-insensitive."""
    cfg.validate()
    out = []
    for T in cfg.T:
        reports = [run_single(cfg, T, rep) for rep in range(cfg.reps)]
        out.append(Aggregate(T=T, reports=reports))
    return out


def results_csv(cfg: ExperimentConfig, aggregates: list[Aggregate]) -> str:
    buf = io.StringIO()
    buf.write(f"# config: {config_echo(cfg)}\n")
    buf.write(
        "T,mean_regret,stderr_regret,mean_collision_rounds,"
        "mean_comm_rounds,mean_comm_bits,mean_fixed_comm,mean_random_comm,"
        "mean_protocol_rounds,mean_organic_collisions\n"
    )
    for agg in aggregates:
        buf.write(
            f"{agg.T},{agg.mean_regret!r},{agg.stderr_regret!r},"
            f"{agg.mean_of('collision_rounds')!r},{agg.mean_of('comm_rounds')!r},"
            f"{agg.mean_of('comm_bits')!r},{agg.mean_of('fixed_comm_rounds')!r},"
            f"{agg.mean_of('random_comm_rounds')!r},{agg.mean_of('protocol_rounds')!r},"
            f"{agg.mean_of('organic_collision_rounds')!r}\n"
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Statistics utilities
# ---------------------------------------------------------------------------

@dataclass
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    points: list[tuple[float, float]]  # (log T, log regret)


def fit_slope(points) -> SlopeFit:
    """Least squares on (log T, log mean regret)."""
    usable = []
    for T, regret in points:
        if regret <= 0:
            warnings.warn(f"dropping nonpositive regret {regret} at T={T}")
            continue
        usable.append((math.log(T), math.log(regret)))
    if len(usable) < 3:
        raise ConfigurationError("need at least 3 positive points for a slope fit")
    x = np.array([p[0] for p in usable])
    y = np.array([p[1] for p in usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(slope=float(slope), intercept=float(intercept), r2=r2,
                    points=usable)


def tv_distance(counts, target) -> float:
    """Total variation between empirical frequencies and a target law.

    ``counts`` and ``target`` are dense vectors on the same support (an
    unused leading slot is allowed on either).
    """
    c = np.asarray(counts, dtype=np.float64)
    q = np.asarray(target, dtype=np.float64)
    if c.size == q.size + 1 and c[0] == 0.0:
        c = c[1:]
    elif q.size == c.size + 1 and q[0] == 0.0:
        q = q[1:]
    if c.size != q.size:
        raise ConfigurationError("support sizes differ")
    n = c.sum()
    if n < 1:
        raise ConfigurationError("need at least one sample")
    return 0.5 * float(np.abs(c / n - q).sum())
