"""JSON analysis reports.

Top-level keys are ``version``, ``inputs``, ``params`` and ``results``;
``results.kind`` names the payload type so that a parsed report rebuilds
the same typed object it was written from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import InputError
from .io import json_text
from .pipeline import MainSequenceReport, PvafBatch
from .sampling import SamplingSweepResult


@dataclass(frozen=True, eq=False)
class FrequencyResponseTable:
    filters: tuple
    freq_hz: np.ndarray
    magnitude_single_pass: np.ndarray  # (n_filters, n_freq)
    magnitude_zero_phase: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, FrequencyResponseTable):
            return NotImplemented
        return (tuple(self.filters) == tuple(other.filters)
                and np.array_equal(self.freq_hz, other.freq_hz)
                and np.array_equal(self.magnitude_single_pass, other.magnitude_single_pass)
                and np.array_equal(self.magnitude_zero_phase, other.magnitude_zero_phase))

    def rows(self):
        for k, name in enumerate(self.filters):
            for j, f in enumerate(self.freq_hz):
                yield name, float(f), float(self.magnitude_single_pass[k, j]), \
                    float(self.magnitude_zero_phase[k, j])

    def to_dict(self):
        return {
            "filters": list(self.filters),
            "freq_hz": self.freq_hz.tolist(),
            "magnitude_single_pass": self.magnitude_single_pass.tolist(),
            "magnitude_zero_phase": self.magnitude_zero_phase.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["filters"]), np.asarray(d["freq_hz"], float),
                   np.asarray(d["magnitude_single_pass"], float).reshape(len(d["filters"]), -1),
                   np.asarray(d["magnitude_zero_phase"], float).reshape(len(d["filters"]), -1))


@dataclass(frozen=True, eq=False)
class BandSeries:
    band_names: tuple
    t_ms: np.ndarray
    unfiltered: np.ndarray
    bands: np.ndarray  # (n_bands, n_samples)

    def __eq__(self, other):
        if not isinstance(other, BandSeries):
            return NotImplemented
        return (tuple(self.band_names) == tuple(other.band_names)
                and all(np.array_equal(getattr(self, k), getattr(other, k))
                        for k in ("t_ms", "unfiltered", "bands")))

    def to_dict(self):
        return {"band_names": list(self.band_names), "t_ms": self.t_ms.tolist(),
                "unfiltered": self.unfiltered.tolist(), "bands": self.bands.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["band_names"]), np.asarray(d["t_ms"], float),
                   np.asarray(d["unfiltered"], float),
                   np.asarray(d["bands"], float).reshape(len(d["band_names"]), -1))


@dataclass(frozen=True)
class MinRate:
    max_signal_freq_hz: float
    domain: str
    rate_hz: float

    def to_dict(self):
        return {"max_signal_freq_hz": self.max_signal_freq_hz, "domain": self.domain,
                "rate_hz": self.rate_hz}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


PAYLOADS = {
    "pvaf": PvafBatch,
    "mainseq": MainSequenceReport,
    "sampling": SamplingSweepResult,
    "freq-response": FrequencyResponseTable,
    "bands": BandSeries,
    "min-rate": MinRate,
}
_KIND_OF = {cls: kind for kind, cls in PAYLOADS.items()}


@dataclass(frozen=True)
class AnalysisReport:
    payload: object
    inputs: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def kind(self):
        return _KIND_OF[type(self.payload)]

    def to_dict(self):
        return {
            "version": self.version,
            "inputs": self.inputs,
            "params": self.params,
            "results": {"kind": self.kind, "data": self.payload.to_dict()},
        }

    def to_json(self):
        return json_text(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        missing = {"version", "inputs", "params", "results"} - set(d)
        if missing:
            raise InputError(f"report lacks keys {sorted(missing)}")
        res = d["results"]
        try:
            payload_cls = PAYLOADS[res["kind"]]
        except KeyError:
            raise InputError(f"unknown report kind {res.get('kind')!r}") from None
        return cls(payload_cls.from_dict(res["data"]), dict(d["inputs"]), dict(d["params"]),
                   d["version"])

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
