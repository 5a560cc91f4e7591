"""Experiment presets, the sweep runner, and CSV result emission.

The CSV schema is fixed:
``preset,chi,l,r,c,L,S,decoder,theta,alpha,gamma,iterations,trials,metric,value,stderr``
and a run is fully determined by its (config, seed) pair, including the bytes
of the emitted CSV.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .clique import decode_fixed, store_clique, store_ring
from .core import ClusterLayout, ConnectionMatrix, DecoderSpec, InfeasibleConfigError
from .corpus import (
    DistortionSpec,
    distort_message,
    random_messages,
    random_symbol_sequences,
    random_vectorial_sequences,
)
from .duallayer import DoubleLayerNetwork, decode_double, store_double
from .rng import CORPUS_STREAM, TRIAL_STREAM, substream
from .tournament import decode_sequence, schedule_density, sequence_exact, store_sequences, sber
from .vectorial import decode_vectorial, pattern_error_rate, store_vectorial

__all__ = [
    "CSV_HEADER",
    "ExperimentConfig",
    "PRESETS",
    "ResultRow",
    "TABLE1_ROWS",
    "parse_config_file",
    "preset_config",
    "rows_to_csv",
    "run_experiment",
    "write_csv",
]

CSV_HEADER = "preset,chi,l,r,c,L,S,decoder,theta,alpha,gamma,iterations,trials,metric,value,stderr"

# chi, l, r, L, listed capacity, listed efficiency
TABLE1_ROWS = (
    (8, 512, 3, 16, 1513.0, 0.035),
    (50, 128, 10, 100, 2335.0, 0.200),
    (50, 128, 20, 100, 5693.0, 0.243),
    (50, 128, 49, 100, 11728.0, 0.205),
    (30, 512, 23, 100, 57206.0, 0.285),
    (30, 512, 29, 100, 70914.0, 0.280),
    (100, 2 ** 26, 40, 200, 1.6e15, 0.451),
)


@dataclass(frozen=True)
class ResultRow:
    preset: str
    chi: int | None
    l: int | None
    r: int | None
    c: int | None
    L: int | None
    S: float | None
    decoder: str | None
    theta: float | None
    alpha: int | None
    gamma: float | None
    iterations: int | None
    trials: int
    metric: str
    value: float
    stderr: float


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.10g}"


def rows_to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in (
            row.preset, row.chi, row.l, row.r, row.c, row.L, row.S,
            row.decoder, row.theta, row.alpha, row.gamma, row.iterations,
            row.trials, row.metric, row.value, row.stderr,
        )))
    return "\n".join(lines) + "\n"


def write_csv(rows, path):
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(rows_to_csv(rows))


def _proportion_stderr(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n) if n > 0 else 0.0


def _mean_stderr(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    err = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, err


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; seed fixed means the run is fully reproducible."""

    kind: str
    preset: str = "custom"
    chi: int = 8
    l: int = 256
    r: int = 1
    L: int = 16
    c: int | None = None
    c_max: int | None = None
    s_values: tuple[int, ...] = (1,)
    decoder: DecoderSpec = field(default_factory=lambda: DecoderSpec("wta", iterations=4))
    trials: int = 500
    seed: int = 7
    cue: int | None = None
    restrict: bool = False
    wrap: bool = False
    distortion: DistortionSpec = field(default_factory=DistortionSpec)
    auto_alpha: int | None = None
    cleanup_iterations: int = 4
    gamma: float = 1000.0
    c_list: tuple[int, ...] = (4, 6, 8, 10, 12)

    def validate(self):
        kinds = ("sequence", "clique", "vectorial", "double", "restricted_model", "capacity_table")
        if self.kind not in kinds:
            raise InfeasibleConfigError(f"unknown kind {self.kind!r}")
        if self.kind in ("restricted_model", "capacity_table"):
            return
        if not self.s_values:
            raise InfeasibleConfigError("sweep must contain at least one S value")
        if any(s < 1 for s in self.s_values):
            raise InfeasibleConfigError("S values must be >= 1")
        if list(self.s_values) != sorted(self.s_values):
            raise InfeasibleConfigError("S sweep must be increasing")
        if self.trials < 1:
            raise InfeasibleConfigError("trials must be >= 1")
        if self.chi < 1 or self.l < 2:
            raise InfeasibleConfigError("need chi >= 1 and l >= 2")
        if self.kind == "sequence":
            if not 1 <= self.r <= self.chi - 1:
                raise InfeasibleConfigError(f"need 1 <= r <= chi-1, got r={self.r}")
            cue = self.cue if self.cue is not None else self.r
            if not 1 <= cue < self.L:
                raise InfeasibleConfigError("cue length must be in [1, L)")
            if self.wrap and self.L % self.chi:
                raise InfeasibleConfigError("wrapped pairing needs chi to divide L")
        if self.kind == "clique":
            c = self.c if self.c is not None else self.chi
            if not 2 <= c <= self.chi:
                raise InfeasibleConfigError("need 2 <= c <= chi")
            if self.r >= c:
                raise InfeasibleConfigError("ring degree must be < c")
        if self.kind in ("vectorial", "double"):
            if self.c is None:
                raise InfeasibleConfigError("vectorial runs need a pattern order c")
            c_max = self.c_max if self.c_max is not None else self.c
            if not 1 <= self.c <= c_max <= self.chi:
                raise InfeasibleConfigError("need 1 <= c <= c_max <= chi")
            if not 1 <= self.r <= self.chi - 1:
                raise InfeasibleConfigError(f"need 1 <= r <= chi-1, got r={self.r}")
            if self.restrict and (self.r + 1) * c_max > self.chi:
                raise InfeasibleConfigError(
                    f"restricted corpus impossible: (r+1)*c = {(self.r + 1) * c_max} "
                    f"> chi = {self.chi}"
                )
            if self.L <= self.r:
                raise InfeasibleConfigError("L must exceed the cue length r")


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run a validated config and return its result rows (deterministic per seed)."""
    cfg.validate()
    runner = {
        "sequence": _run_sequence,
        "clique": _run_clique,
        "vectorial": _run_vectorial,
        "double": _run_double,
        "restricted_model": _run_restricted_model,
        "capacity_table": _run_capacity_table,
    }[cfg.kind]
    return runner(cfg)


# -- simulation runners ---------------------------------------------------------

def _run_sequence(cfg: ExperimentConfig) -> list[ResultRow]:
    layout = ClusterLayout(cfg.chi, cfg.l)
    cue = cfg.cue if cfg.cue is not None else cfg.r
    corpus = random_symbol_sequences(
        substream(cfg.seed, CORPUS_STREAM), max(cfg.s_values), cfg.L, cfg.l)
    matrix = ConnectionMatrix(layout, directed=True)
    rows: list[ResultRow] = []
    stored = 0

    def row(S, metric, value, err, trials=cfg.trials):
        return ResultRow(cfg.preset, cfg.chi, cfg.l, cfg.r, cfg.c, cfg.L, S,
                         "wta", None, None, None, 1, trials, metric, value, err)

    for point, S in enumerate(cfg.s_values):
        store_sequences(matrix, corpus[stored:S], cfg.r, wrap=cfg.wrap)
        stored = S
        sbers, failures = [], []
        for trial in range(cfg.trials):
            rng = substream(cfg.seed, TRIAL_STREAM, point, trial)
            ref = corpus[int(rng.integers(0, S))]
            dec = decode_sequence(matrix, ref[:cue], cfg.r, cfg.L)
            sbers.append(sber(ref, dec))
            failures.append(sbers[-1] > 0.0)
        mean, err = _mean_stderr(sbers)
        rows.append(row(S, "sber_sim", mean, err))
        p_fail = float(np.mean(failures))
        rows.append(row(S, "sqer_sim", p_fail, _proportion_stderr(p_fail, cfg.trials)))
        d_sim = schedule_density(matrix, cfg.r)
        d_model = analytic.density_seq(cfg.chi, cfg.l, S, cfg.L)
        rows.append(row(S, "density_sim", d_sim, 0.0, trials=1))
        rows.append(row(S, "density_model", d_model, 0.0, trials=0))
        # error floor of the network actually built (measured density) and of
        # the idealized density model, side by side
        rows.append(row(S, "sber_struct", analytic.structural_sber(d_sim, cfg.r, cfg.l),
                        0.0, trials=1))
        rows.append(row(S, "sber_struct_model",
                        analytic.structural_sber(d_model, cfg.r, cfg.l), 0.0, trials=0))
    return rows


def _run_clique(cfg: ExperimentConfig) -> list[ResultRow]:
    layout = ClusterLayout(cfg.chi, cfg.l)
    c = cfg.c if cfg.c is not None else cfg.chi
    messages = random_messages(substream(cfg.seed, CORPUS_STREAM),
                               max(cfg.s_values), layout, c)
    mats = {
        "clique": ConnectionMatrix(layout, directed=False),
        "ring": ConnectionMatrix(layout, directed=False),
    }
    spec = cfg.decoder if cfg.decoder.rule != "wta" else DecoderSpec("wta", iterations=4)
    rows: list[ResultRow] = []
    stored = 0
    for point, S in enumerate(cfg.s_values):
        for msg in messages[stored:S]:
            store_clique(mats["clique"], msg)
            store_ring(mats["ring"], msg, cfg.r)
        stored = S
        wrong = {"clique": 0, "ring": 0}
        for trial in range(cfg.trials):
            rng = substream(cfg.seed, TRIAL_STREAM, point, trial)
            msg = messages[int(rng.integers(0, S))]
            cue = distort_message(rng, msg, cfg.distortion, layout)
            clusters = (msg // cfg.l).tolist()
            want = frozenset(int(f) for f in msg)
            for name, mat in mats.items():
                got = decode_fixed(mat, cue, spec, clusters=clusters)
                wrong[name] += got != want
        for name in ("clique", "ring"):
            p = wrong[name] / cfg.trials
            rows.append(ResultRow(
                cfg.preset, cfg.chi, cfg.l, cfg.r if name == "ring" else c - 1,
                c, None, S, spec.rule, None, None, None, spec.iterations,
                cfg.trials, f"mer_{name}", p, _proportion_stderr(p, cfg.trials)))
            rows.append(ResultRow(
                cfg.preset, cfg.chi, cfg.l, cfg.r if name == "ring" else c - 1,
                c, None, S, spec.rule, None, None, None, spec.iterations,
                1, f"density_{name}", mats[name].measured_density(), 0.0))
    return rows


def _vectorial_corpus(cfg: ExperimentConfig):
    return random_vectorial_sequences(
        substream(cfg.seed, CORPUS_STREAM), max(cfg.s_values), cfg.L,
        ClusterLayout(cfg.chi, cfg.l), cfg.c, order_max=cfg.c_max,
        r=cfg.r, restrict=cfg.restrict)


def _run_vectorial(cfg: ExperimentConfig) -> list[ResultRow]:
    layout = ClusterLayout(cfg.chi, cfg.l)
    corpus = _vectorial_corpus(cfg)
    matrix = ConnectionMatrix(layout, directed=True)
    rows: list[ResultRow] = []
    stored = 0
    for point, S in enumerate(cfg.s_values):
        for seq in corpus[stored:S]:
            store_vectorial(matrix, seq, cfg.r, restrict=cfg.restrict)
        stored = S
        pers = []
        for trial in range(cfg.trials):
            rng = substream(cfg.seed, TRIAL_STREAM, point, trial)
            ref = corpus[int(rng.integers(0, S))]
            res = decode_vectorial(matrix, ref[:cfg.r], cfg.r, cfg.decoder,
                                   cfg.L, restrict=cfg.restrict)
            pers.append(pattern_error_rate(ref, res))
        mean, err = _mean_stderr(pers)
        rows.append(ResultRow(
            cfg.preset, cfg.chi, cfg.l, cfg.r, cfg.c, cfg.L, S,
            cfg.decoder.rule, cfg.decoder.theta, cfg.decoder.alpha, None, 1,
            cfg.trials, "per", mean, err))
    return rows


def _run_double(cfg: ExperimentConfig) -> list[ResultRow]:
    layout = ClusterLayout(cfg.chi, cfg.l)
    corpus = _vectorial_corpus(cfg)
    alpha = cfg.decoder.alpha if cfg.decoder.alpha is not None else cfg.c
    net = DoubleLayerNetwork.create(layout)
    rows: list[ResultRow] = []
    stored = 0
    for point, S in enumerate(cfg.s_values):
        for seq in corpus[stored:S]:
            store_double(net, seq, cfg.r, restrict=cfg.restrict)
        stored = S
        per_single, per_double = [], []
        for trial in range(cfg.trials):
            rng = substream(cfg.seed, TRIAL_STREAM, point, trial)
            ref = corpus[int(rng.integers(0, S))]
            cue = ref[:cfg.r]
            single = decode_vectorial(net.hetero, cue, cfg.r,
                                      DecoderSpec("gwsta", alpha=alpha),
                                      cfg.L, restrict=cfg.restrict)
            double = decode_double(net, cue, cfg.r, alpha, cfg.L,
                                   auto_alpha=cfg.auto_alpha,
                                   iterations=cfg.cleanup_iterations,
                                   gamma=cfg.gamma, restrict=cfg.restrict)
            per_single.append(pattern_error_rate(ref, single))
            per_double.append(pattern_error_rate(ref, double))
        mean_s, err_s = _mean_stderr(per_single)
        mean_d, err_d = _mean_stderr(per_double)
        rows.append(ResultRow(cfg.preset, cfg.chi, cfg.l, cfg.r, cfg.c, cfg.L, S,
                              "gwsta", None, alpha, None, 1,
                              cfg.trials, "per_single", mean_s, err_s))
        rows.append(ResultRow(cfg.preset, cfg.chi, cfg.l, cfg.r, cfg.c, cfg.L, S,
                              "gwsta", None, alpha, cfg.gamma, cfg.cleanup_iterations,
                              cfg.trials, "per_double", mean_d, err_d))
    return rows


# -- analytic runners -----------------------------------------------------------

def _feasible_restricted_r(chi: int, c: int) -> range:
    return range(1, max(1, (chi - c) // c) + 1)


def _run_restricted_model(cfg: ExperimentConfig) -> list[ResultRow]:
    """Restricted-decoding error model versus the anticipation/order product.

    For every order in ``c_list`` the sequence count is adjusted so the best
    operating point sits at an error rate of 1 percent, then the whole curve
    over r is emitted.
    """
    rows: list[ResultRow] = []
    for c in cfg.c_list:
        r_range = _feasible_restricted_r(cfg.chi, c)

        def best(S, r_range=r_range, c=c):
            return min(analytic.sqer_restricted(cfg.chi, cfg.l, r, c, S, cfg.L)
                       for r in r_range)

        lo, hi = 1.0, 1.0
        while best(hi) < 0.01:
            lo, hi = hi, hi * 2.0
        for _ in range(100):
            mid = (lo + hi) / 2.0
            if best(mid) < 0.01:
                lo = mid
            else:
                hi = mid
        s_star = (lo + hi) / 2.0
        rows.append(ResultRow(cfg.preset, cfg.chi, cfg.l, None, c, cfg.L, s_star,
                              None, None, None, None, None, 0, "s_one_percent",
                              s_star, 0.0))
        for r in r_range:
            rows.append(ResultRow(
                cfg.preset, cfg.chi, cfg.l, r, c, cfg.L, s_star, None, None,
                None, None, None, 0, "sqer_model",
                analytic.sqer_restricted(cfg.chi, cfg.l, r, c, s_star, cfg.L), 0.0))
    return rows


def _run_capacity_table(cfg: ExperimentConfig) -> list[ResultRow]:
    """Analytic storage capacity at the 1 percent sequence error target."""
    rows: list[ResultRow] = []
    for chi, l, r, L, _listed_s, _listed_eta in TABLE1_ROWS:
        s_max = analytic.solve_sequence_capacity(chi, l, r, L, target=0.01)
        rows.append(ResultRow(cfg.preset, chi, l, r, None, L, s_max, None, None,
                              None, None, None, 0, "s_capacity", s_max, 0.0))
        rows.append(ResultRow(cfg.preset, chi, l, r, None, L, s_max, None, None,
                              None, None, None, 0, "efficiency",
                              analytic.efficiency_seq(chi, l, r, L, s_max), 0.0))
    return rows


# -- presets ----------------------------------------------------------------------

def _fig3(trials: int, seed: int, s_values) -> ExperimentConfig:
    return ExperimentConfig(
        kind="clique", preset="fig3", chi=8, l=256, c=8, r=3, L=8,
        s_values=tuple(s_values or (4000, 8000, 12000, 16000, 20000)),
        decoder=DecoderSpec("wta", iterations=4),
        distortion=DistortionSpec(erasure=0.5),
        trials=trials, seed=seed)


def _fig5(trials: int, seed: int, s_values) -> ExperimentConfig:
    return ExperimentConfig(
        kind="sequence", preset="fig5", chi=20, l=256, r=19, L=100,
        s_values=tuple(s_values or (2000, 5000, 8000, 11000, 13000, 15000)),
        trials=trials, seed=seed)


def _fig7(trials: int, seed: int, s_values) -> ExperimentConfig:
    return ExperimentConfig(kind="restricted_model", preset="fig7",
                            chi=100, l=64, L=100, trials=1, seed=seed)


def _fig9(trials: int, seed: int, s_values) -> ExperimentConfig:
    return ExperimentConfig(
        kind="double", preset="fig9", chi=100, l=64, r=2, L=100, c=20,
        s_values=tuple(s_values or (595, 610, 625, 635)),
        decoder=DecoderSpec("gwsta", alpha=20),
        trials=trials, seed=seed)


def _table1(trials: int, seed: int, s_values) -> ExperimentConfig:
    return ExperimentConfig(kind="capacity_table", preset="table1",
                            trials=1, seed=seed)


PRESETS = {
    "fig3": _fig3,
    "fig5": _fig5,
    "fig7": _fig7,
    "fig9": _fig9,
    "table1": _table1,
}

_PRESET_TRIALS = {"fig3": 400, "fig5": 500, "fig7": 1, "fig9": 300, "table1": 1}


def preset_config(name: str, trials: int | None = None, seed: int | None = None,
                  s_values=None) -> ExperimentConfig:
    if name not in PRESETS:
        raise InfeasibleConfigError(
            f"unknown preset {name!r}, expected one of {sorted(PRESETS)}")
    cfg = PRESETS[name](trials or _PRESET_TRIALS[name], 7 if seed is None else seed,
                        s_values)
    return cfg


# -- config files -----------------------------------------------------------------

_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def parse_config_file(path) -> ExperimentConfig:
    """Key = value text mirroring ExperimentConfig; '#' starts a comment."""
    raw: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key = value")
            key, _, value = line.partition("=")
            raw[key.strip().lower()] = value.strip()

    def geti(key, default=None):
        return int(raw[key]) if key in raw else default

    def getf(key, default=None):
        return float(raw[key]) if key in raw else default

    def getb(key, default=False):
        return _BOOL[raw[key].lower()] if key in raw else default

    if "kind" not in raw:
        raise InfeasibleConfigError(f"{path}: config needs a kind")
    decoder = DecoderSpec(
        raw.get("decoder", "wta"),
        theta=getf("theta"),
        alpha=geti("alpha"),
        gamma=getf("gamma", 0.0),
        iterations=geti("iterations", 4 if raw.get("decoder", "wta") == "wta" else 1),
    )
    s_values = tuple(int(tok) for tok in raw.get("s", "1").replace(",", " ").split())
    return ExperimentConfig(
        kind=raw["kind"],
        preset=raw.get("preset", "custom"),
        chi=geti("chi", 8),
        l=geti("l", 256),
        r=geti("r", 1),
        L=geti("l_seq", geti("length", 16)),
        c=geti("c"),
        c_max=geti("c_max"),
        s_values=s_values,
        decoder=decoder,
        trials=geti("trials", 500),
        seed=geti("seed", 7),
        cue=geti("cue"),
        restrict=getb("restrict"),
        wrap=getb("wrap"),
        distortion=DistortionSpec(
            erasure=getf("erasure", 0.0),
            error=getf("error", 0.0),
            insertions=geti("insertions", 0),
        ),
        auto_alpha=geti("auto_alpha"),
        cleanup_iterations=geti("cleanup_iterations", 4),
        gamma=getf("memory_effect", getf("gamma_cleanup", 1000.0)),
    )
