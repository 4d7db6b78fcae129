"""Batch analyses over an annotated recording: PVAF and main sequence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContainsGaps, InputError, SnippetOutOfBounds
from .filters import (
    DEFAULT_BANDS,
    DEFAULT_LOWPASS_CUTOFFS,
    PAPER_ORDER,
    FilterSpec,
    decompose_many,
    design_filter,
    zero_phase_filter_many,
)
from .kinematics import (
    SG_ORDER,
    SG_WINDOW,
    SNIPPET_PAD_MS,
    extract_snippet,
    features_from_arrays,
    snippet_event,
    velocity_array,
)
from .statfit import (
    Model,
    MainSequenceFit,
    OverlapFlags,
    PvafTable,
    TTestResult,
    aggregate_pvaf,
    ci_overlap_report,
    difference_curve,
    fit_model,
    incremental_pvaf,
    paired_t_test,
)

UNFILTERED = "unfiltered"


def collect_snippets(ts, events, pad_ms=SNIPPET_PAD_MS):
    """Snippets for every usable event; the rest are returned with the reason."""
    kept, dropped = [], []
    for i, ev in enumerate(events):
        try:
            snip = extract_snippet(ts, ev, pad_ms)
        except (SnippetOutOfBounds, ContainsGaps) as exc:
            dropped.append({"event": i, "reason": type(exc).__name__})
            continue
        kept.append((i, snip.samples, snippet_event(ev, pad_ms, ts.rate_hz)))
    return kept, dropped


@dataclass(frozen=True, eq=True)
class PvafBatch:
    table: PvafTable
    event_indices: tuple
    excluded: tuple = ()

    def to_dict(self):
        return {
            "table": self.table.to_dict(),
            "event_indices": list(self.event_indices),
            "excluded": [dict(e) for e in self.excluded],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(PvafTable.from_dict(d["table"]), tuple(d["event_indices"]),
                   tuple(dict(e) for e in d["excluded"]))


def pvaf_batch(ts, events, bands=DEFAULT_BANDS, pad_ms=SNIPPET_PAD_MS, order=PAPER_ORDER):
    kept, dropped = collect_snippets(ts, events, pad_ms)
    if not kept:
        raise InputError("no event has a usable snippet")
    arrays = [k[1] for k in kept]
    decomposed = decompose_many(arrays, ts.rate_hz, bands, order)
    rows = [incremental_pvaf(x, parts) for x, parts in zip(arrays, decomposed)]
    table = aggregate_pvaf(rows, [b.name for b in bands])
    return PvafBatch(table, tuple(k[0] for k in kept), tuple(dropped))


def condition_label(cutoff):
    return UNFILTERED if cutoff is None else f"lowpass-{cutoff:g}"


def condition_features(ts, events, cutoffs=DEFAULT_LOWPASS_CUTOFFS, pad_ms=SNIPPET_PAD_MS,
                       order=PAPER_ORDER, window=SG_WINDOW, poly_order=SG_ORDER):
    """``{condition: (amplitudes, peak_velocities)}`` plus the dropped events.

    Each snippet is cut first and then filtered, as in the original analysis.
    """
    kept, dropped = collect_snippets(ts, events, pad_ms)
    if not kept:
        raise InputError("no event has a usable snippet")
    arrays = [k[1] for k in kept]
    out = {}
    for cutoff in (None, *cutoffs):
        if cutoff is None:
            filtered = arrays
        else:
            stages = design_filter(FilterSpec.lowpass(cutoff, ts.rate_hz, order))
            filtered = zero_phase_filter_many(stages, arrays)
        feats = [
            features_from_arrays(x, velocity_array(x, ts.rate_hz, window, poly_order), ev)
            for x, (_, _, ev) in zip(filtered, kept)
        ]
        out[condition_label(cutoff)] = (
            np.array([f.amplitude_deg for f in feats]),
            np.array([f.peak_velocity_dps for f in feats]),
        )
    return out, dropped


@dataclass(frozen=True)
class MainSequenceReport:
    fits: tuple
    model_ttest: TTestResult
    differences: tuple
    overlap: tuple
    n_events: int
    excluded: tuple = ()
    event_source: str = "annotations"

    def fit(self, label, model=Model.POWER_LAW):
        for f in self.fits:
            if f.condition_label == label and f.model is Model(model):
                return f
        raise KeyError((label, model))

    def to_dict(self):
        return {
            "fits": [f.to_dict() for f in self.fits],
            "model_ttest": self.model_ttest._asdict() if self.model_ttest else None,
            "differences": [dict(d) for d in self.differences],
            "overlap": [{"condition_label": o.condition_label, "flags": dict(o.flags)}
                        for o in self.overlap],
            "n_events": self.n_events,
            "excluded": [dict(e) for e in self.excluded],
            "event_source": self.event_source,
        }

    @classmethod
    def from_dict(cls, d):
        tt = d["model_ttest"]
        return cls(
            tuple(MainSequenceFit.from_dict(f) for f in d["fits"]),
            TTestResult(**tt) if tt else None,
            tuple(dict(x) for x in d["differences"]),
            tuple(OverlapFlags(o["condition_label"], dict(o["flags"])) for o in d["overlap"]),
            int(d["n_events"]),
            tuple(dict(e) for e in d["excluded"]),
            d["event_source"],
        )


def mainseq_analysis(ts, events, cutoffs=DEFAULT_LOWPASS_CUTOFFS, pad_ms=SNIPPET_PAD_MS,
                     order=PAPER_ORDER, grid_points=256, event_source="annotations"):
    """Power-law and exponential fits per filter condition and their comparisons."""
    feats, dropped = condition_features(ts, events, cutoffs, pad_ms, order)
    fits = []
    for label, (amp, vel) in feats.items():
        ok = (amp > 0) & (vel > 0)
        pts = np.column_stack([amp[ok], vel[ok]])
        for model in (Model.POWER_LAW, Model.EXPONENTIAL):
            fits.append(fit_model(model, pts, label))
    power = [f for f in fits if f.model is Model.POWER_LAW]
    expo = [f for f in fits if f.model is Model.EXPONENTIAL]
    ttest = paired_t_test([f.adj_r2 for f in power], [f.adj_r2 for f in expo])
    ref = power[0]
    amp_all = feats[UNFILTERED][0]
    amp_all = amp_all[amp_all > 0]
    grid = np.linspace(amp_all.min(), amp_all.max(), grid_points)
    diffs = []
    for f in power[1:]:
        dc = difference_curve(ref, f, grid)
        diffs.append({
            "condition_label": f.condition_label,
            "amplitudes": dc.amplitudes.tolist(),
            "diff": dc.diff.tolist(),
            "crossovers": dc.crossovers,
        })
    overlap = ci_overlap_report(ref, power[1:])
    return MainSequenceReport(tuple(fits), ttest, tuple(diffs), tuple(overlap),
                              len(events), tuple(dropped), event_source)
