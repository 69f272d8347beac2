"""Dispatch experiment configs to the library and format the resulting rows."""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass
from typing import Iterator

import numpy as np

from . import disturbance, ensemble, oracles, pointer, postselect, qudit
from .config import ExperimentConfig
from .errors import ImpossibleOutcomeError
from .spin import SpinState, delta_sigma, rotate_to_axis, sigma_bar

COLUMNS = ("scenario", "n", "epsilon", "state", "metric", "exact", "reference", "ratio", "seed", "wall_ms")


@dataclass(frozen=True)
class SweepRecord:
    scenario: str
    n: int | None
    epsilon: float | None
    state: str
    metric: str
    exact: float | None
    reference: float | None = None
    ratio: float | None = None
    seed: int | None = None
    wall_ms: float | None = None

    @property
    def is_error(self) -> bool:
        return self.metric.startswith("error:")


def _ratio(exact, reference):
    if exact is None or reference is None or reference == 0:
        return None
    return exact / reference


def _fmt_state(cfg: ExperimentConfig) -> tuple[SpinState, str]:
    if cfg.theta is not None:
        return rotate_to_axis(cfg.theta, cfg.phi), f"theta={cfg.theta:.15g};phi={cfg.phi:.15g}"
    p = 0.5 if cfg.c_plus_sq is None else cfg.c_plus_sq
    return SpinState.from_probability(p, cfg.phi), f"c_plus_sq={p:.15g}"


class _Emitter:
    """Collects rows for one scenario, stamping common fields."""

    def __init__(self, cfg: ExperimentConfig, state: str):
        self.cfg = cfg
        self.state = state
        self.rows: list[SweepRecord] = []
        self._clock = time.perf_counter()

    def __call__(self, n, eps, metric, exact, reference=None, *, state=None, seed=None):
        now = time.perf_counter()
        wall_ms = (now - self._clock) * 1e3
        self._clock = now
        exact = None if exact is None else float(exact)
        reference = None if reference is None else float(reference)
        self.rows.append(
            SweepRecord(
                scenario=self.cfg.scenario,
                n=None if n is None else int(n),
                epsilon=None if eps is None else float(eps),
                state=state or self.state,
                metric=metric,
                exact=exact,
                reference=reference,
                ratio=_ratio(exact, reference),
                seed=seed,
                wall_ms=wall_ms if self.cfg.timing else None,
            )
        )


def _pointer_points(cfg: ExperimentConfig, n: int) -> Iterator[tuple[float | None, pointer.GaussianPointer]]:
    eps_values = cfg.epsilon_values()
    if eps_values is None:
        yield None, pointer.GaussianPointer(0.0, cfg.width)
        return
    for eps in eps_values:
        yield eps, pointer.GaussianPointer(0.0, 1.0 / (eps * np.sqrt(n)))


def _run_residual(cfg, psi, emit):
    sb, ds = sigma_bar(psi), delta_sigma(psi)
    for n in cfg.n_values():
        state = ensemble.from_product_state(psi, n)
        r = ensemble.residual_norm(state, sb)
        emit(n, None, "residual_norm", r, ds / np.sqrt(n))
        emit(n, None, "residual_norm_vs_inverse_n", r, ds / n)
        emit(n, None, "frequency_residual", ensemble.frequency_operator_residual(state),
             np.sqrt(psi.p_plus * psi.p_minus / n))


def _run_commutator(cfg, psi, emit):
    for n in cfg.n_values():
        if n <= cfg.dense_cap:
            res = ensemble.commutator_residual(n, cap=cfg.dense_cap)
            emit(n, None, "identity_residual", res.identity_residual, 0.0)
            emit(n, None, "commutator_norm", res.commutator_norm, 2.0 / n)
        else:
            emit(n, None, "commutator_norm", ensemble.commutator_norm(n), 2.0 / n)


def _run_entangle(cfg, psi, emit):
    ds = delta_sigma(psi)
    for n in cfg.n_values():
        state = ensemble.from_product_state(psi, n)
        for eps, ptr in _pointer_points(cfg, n):
            chi = pointer.delta_chi_norm(state, ptr)
            emit(n, eps, "delta_chi_sq", chi.exact, chi.perturbative)
            emit(n, eps, "limit_distance", pointer.limit_distance(state, ptr), np.sqrt(chi.perturbative))
            if eps is not None:
                emit(n, eps, "delta_chi_sq_vs_plateau", chi.exact, pointer.fixed_epsilon_plateau(ds, eps))
            else:
                emit(n, eps, "pointer_width", ptr.width)


def _resolve_selection(sel, state) -> postselect.PostSelection:
    if sel == "modal":
        return postselect.modal_selection(state)
    if sel == "max":
        return postselect.extreme_selection(state.n, up=True)
    if sel == "min":
        return postselect.extreme_selection(state.n, up=False)
    return postselect.PostSelection(state.n, int(sel))


def _run_postselect(cfg, psi, emit):
    ds = delta_sigma(psi)
    for n in cfg.n_values():
        state = ensemble.from_product_state(psi, n)
        for eps, ptr in _pointer_points(cfg, n):
            for raw in cfg.n_plus:
                sel = _resolve_selection(raw, state)
                tag = f"@n_plus={sel.n_plus}"
                try:
                    rep = postselect.delta_p_exact(state, ptr, sel, orders=cfg.orders)
                except ImpossibleOutcomeError:
                    emit(n, eps, "error:impossible_postselection" + tag, None)
                    continue
                emit(n, eps, "delta_p" + tag, rep.exact_norm, rep.perturbative_norm)
                emit(n, eps, "log_selection_probability" + tag, rep.log_selection_probability)
                emit(n, eps, "consistency_gap" + tag, postselect.consistency_gap(state, sel), ds / np.sqrt(n))
                for j, term in enumerate(rep.series_terms[1:], start=1):
                    emit(n, eps, f"series_order_{j}" + tag, term)


def _run_disturb(cfg, psi, emit):
    ds = delta_sigma(psi)
    ns = cfg.n_values()
    limit = ds**2 if cfg.convention == "rotation" else ds**2 / 4.0
    for eps in cfg.epsilon_values():
        for n in ns:
            setting = disturbance.AccuracySetting(eps, n, cfg.convention)
            nf = disturbance.no_flip_probability(psi, setting)
            emit(n, eps, "no_flip", nf.exact, nf.estimate)
            emit(n, eps, "joint_survival", disturbance.joint_survival_probability(psi, setting), nf.estimate)
        if len(ns) >= 2 and ds > 0:
            c = disturbance.fitted_constant(psi, eps, ns, cfg.convention)
            emit(max(ns), eps, "fitted_constant", c, limit)


def _run_sweep(cfg, psi, emit):
    rows = disturbance.accuracy_tradeoff_sweep(psi, cfg.epsilon_values(), cfg.n_values(), cfg.convention)
    for r in rows:
        emit(r.n, r.epsilon, "pointer_width", r.pointer_width)
        emit(r.n, r.epsilon, "resolution", r.resolution)
        emit(r.n, r.epsilon, "no_flip", r.no_flip, r.estimate)
        emit(r.n, r.epsilon, "resolves_gap", float(r.resolves_gap))
        emit(r.n, r.epsilon, "inaccurate", float(r.inaccurate))


def random_qudit_instance(rng: np.random.Generator, min_separation: float = 1e-3) -> qudit.QuditSpec:
    n_levels = int(rng.integers(2, 6))
    while True:
        levels = rng.uniform(-1.0, 1.0, n_levels)
        if np.min(np.diff(np.sort(levels))) >= min_separation:
            break
    probs = rng.dirichlet(np.ones(n_levels))
    probs = probs / probs.sum()
    return qudit.QuditSpec(tuple(levels), tuple(probs))


def _run_qudit(cfg, psi, emit):
    if cfg.levels is not None:
        spec = qudit.QuditSpec(tuple(cfg.levels), tuple(cfg.probs))
        moments = qudit.moments_from_probs(spec)
        for p, m in enumerate(moments, start=1):
            emit(None, None, f"moment_{p}", m)
        inv = qudit.invert_moments(spec.levels, moments)
        for i, (got, want) in enumerate(zip(inv.probs, spec.probs)):
            emit(None, None, f"prob_{i}", got, want)
        emit(None, None, "condition", inv.condition)
        if cfg.trials is not None:
            rng = np.random.default_rng(cfg.seed)
            for n in cfg.n_values():
                counts = rng.multinomial(n, spec.probs)
                est = qudit.probs_from_moments(spec.levels, qudit.collective_moments(counts, spec.levels))
                for i, (got, freq) in enumerate(zip(est, counts / n)):
                    emit(n, None, f"sampled_prob_{i}", got, freq, seed=cfg.seed)
    if cfg.random_states:
        rng = np.random.default_rng(cfg.seed)
        for idx in range(cfg.random_states):
            spec = random_qudit_instance(rng)
            got = qudit.probs_from_moments(spec.levels, qudit.moments_from_probs(spec))
            err = float(np.max(np.abs(got - np.asarray(spec.probs))))
            emit(None, None, "roundtrip_max_error", err, state=f"instance={idx}", seed=cfg.seed)


def _run_born(cfg, psi, emit):
    sb, ds = sigma_bar(psi), delta_sigma(psi)
    t = cfg.trials
    for n in cfg.n_values():
        state = ensemble.from_product_state(psi, n)
        # one independent stream per N, reproducible from (seed, N)
        rng = np.random.default_rng([cfg.seed, n])
        out = ensemble.sample_microscopic(state, rng, trials=t)
        gap = out.f_n - sb
        emit(n, None, "mean_f", float(np.mean(out.f_n)), sb, seed=cfg.seed)
        emit(n, None, "mean_gap", abs(float(np.mean(gap))), 5.0 * ds / np.sqrt(t * n), seed=cfg.seed)
        emit(n, None, "rms_gap", float(np.sqrt(np.mean(gap**2))), ds / np.sqrt(n), seed=cfg.seed)


def random_bloch_state(rng: np.random.Generator) -> tuple[SpinState, float, float]:
    theta = float(np.arccos(rng.uniform(-1.0, 1.0)))
    phi = float(rng.uniform(0.0, 2.0 * np.pi))
    return rotate_to_axis(theta, phi), theta, phi


def _run_uncertainty(cfg, psi, emit):
    if cfg.random_states:
        rng = np.random.default_rng(cfg.seed)
        states = [random_bloch_state(rng) for _ in range(cfg.random_states)]
        labelled = [(s, f"theta={th:.15g};phi={ph:.15g}") for s, th, ph in states]
    else:
        labelled = [(psi, None)]
    for n in cfg.n_values():
        for spin, label in labelled:
            rep = disturbance.uncertainty_check(ensemble.from_product_state(spin, n))
            emit(n, None, "collective_relation", rep.collective.lhs, rep.collective.rhs, state=label, seed=cfg.seed)
            emit(n, None, "single_spin_relation", rep.single_spin.lhs, rep.single_spin.rhs, state=label, seed=cfg.seed)


def _run_overlap(cfg, psi, emit):
    pairs = [(0.0, 1.0, 1.0)]
    if cfg.pairs:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.pairs):
            width = float(np.exp(rng.uniform(np.log(0.05), np.log(5.0))))
            pairs.append((float(rng.uniform(-5, 5)), float(rng.uniform(-5, 5)), width))
    for a, b, w in pairs:
        analytic = pointer.overlap(pointer.GaussianPointer(a, w), pointer.GaussianPointer(b, w))
        quad = oracles.quadrature_overlap(a, 1.0, b, 1.0, w)
        emit(None, None, "overlap", analytic.real, quad.real,
             state=f"a={a:.15g};b={b:.15g};width={w:.15g}", seed=cfg.seed if cfg.pairs else None)


_DISPATCH = {
    "residual": _run_residual,
    "commutator": _run_commutator,
    "entangle": _run_entangle,
    "postselect": _run_postselect,
    "disturb": _run_disturb,
    "sweep": _run_sweep,
    "qudit": _run_qudit,
    "born": _run_born,
    "uncertainty": _run_uncertainty,
    "overlap": _run_overlap,
}


def _sort_key(rec: SweepRecord):
    return (
        rec.scenario,
        -1 if rec.n is None else rec.n,
        -1.0 if rec.epsilon is None else rec.epsilon,
    )


def run(cfg: ExperimentConfig) -> list[SweepRecord]:
    """Run one validated config; rows come back in canonical (scenario, N, epsilon) order."""
    psi, label = _fmt_state(cfg)
    emit = _Emitter(cfg, label)
    _DISPATCH[cfg.scenario](cfg, psi, emit)
    # sorted() is stable, so metric order within a point is preserved
    return sorted(emit.rows, key=_sort_key)


def _fmt_num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return format(x, ".15g")


def _json_num(x):
    if x is None or isinstance(x, int):
        return x
    if not np.isfinite(x):
        return format(x, ".15g")
    return float(format(x, ".15g"))


def format_records(records: list[SweepRecord], fmt: str = "csv") -> str:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in records:
            d = asdict(r)
            writer.writerow([d[c] if c in ("scenario", "state", "metric") else _fmt_num(d[c]) for c in COLUMNS])
    else:
        for r in records:
            d = asdict(r)
            row = {c: (d[c] if c in ("scenario", "state", "metric") else _json_num(d[c])) for c in COLUMNS}
            buf.write(json.dumps(row) + "\n")
    return buf.getvalue()
