"""Command-line entry point (``eyeband`` / ``python -m eyeband``).

Exit status: 0 success, 2 input error, 3 numerical failure. Failures also
print one JSON object ``{"error", "code", "message"}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .errors import EyebandError, InputError
from .filters import (
    DEFAULT_BANDS,
    DEFAULT_LOWPASS_CUTOFFS,
    PAPER_ORDER,
    FilterSpec,
    decompose_bands,
    design_filter,
    frequency_response,
    parse_bands,
)
from .io import (
    atomic_write_text,
    csv_text,
    file_digest,
    parse_events,
    parse_recording,
    write_events,
    write_recording,
)
from .kinematics import SNIPPET_PAD_MS, detect_saccades, velocity
from .pipeline import mainseq_analysis, pvaf_batch
from .report import AnalysisReport, BandSeries, FrequencyResponseTable, MinRate
from .sampling import SUMMARY_KEYS, min_sampling_rate, sweep_sampling
from .signal import extract_window
from .synth import saccade_corpus


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--rate", type=float, default=1000.0, help="sampling rate in Hz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bands", default=None, help='e.g. "0-25,26-50" (0 = low-pass)')
    p.add_argument("--cutoffs", type=_floats, default=None, help="low-pass cutoffs in Hz")
    p.add_argument("--order", type=int, default=PAPER_ORDER)
    p.add_argument("--channel", choices=("x", "y"), default="x")
    p.add_argument("--out", default=None, help="report path (stdout when omitted)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def _bands(args):
    return parse_bands(args.bands) if args.bands else DEFAULT_BANDS


def _params(args):
    skip = {"func", "out", "format"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


def _inputs(**paths):
    return {k: {"path": str(p), "sha256": file_digest(p)} for k, p in paths.items() if p}


def _emit(args, report, csv_header=None, csv_rows=None):
    if args.format == "csv":
        text = csv_text(csv_header, csv_rows)
    else:
        text = report.to_json()
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_freq_response(args):
    if args.cutoffs:
        specs = [FilterSpec.lowpass(c, args.rate, args.order) for c in args.cutoffs]
    else:
        specs = [b.filter_spec(args.rate, args.order) for b in _bands(args)]
    fmax = args.rate / 2 if args.fmax is None else args.fmax
    freqs = np.arange(0.0, fmax + 0.5 * args.step, args.step)
    freqs = freqs[freqs <= args.rate / 2]
    stages = [design_filter(s) for s in specs]
    single = np.array([frequency_response(s, freqs, zero_phase=False) for s in stages])
    table = FrequencyResponseTable(tuple(s.label for s in specs), freqs, single, single ** 2)
    report = AnalysisReport(table, {}, _params(args))
    _emit(args, report, ("filter", "freq_hz", "magnitude_single_pass", "magnitude_zero_phase"),
          table.rows())


def _load(args):
    return parse_recording(args.recording, args.rate, args.channel)


def cmd_bands(args):
    ts = _load(args)
    start = 0 if args.start is None else args.start
    end = len(ts) - 1 if args.end is None else args.end
    ts = extract_window(ts, start, end)
    bands = _bands(args)
    parts = decompose_bands(ts, bands, args.order)
    payload = BandSeries(tuple(b.name for b in bands), ts.times_ms, ts.samples,
                         np.array([p.samples for p in parts]))
    report = AnalysisReport(payload, _inputs(recording=args.recording), _params(args))
    header = ("t_ms", "unfiltered", *payload.band_names)
    rows = (row for row in np.column_stack([payload.t_ms, payload.unfiltered, payload.bands.T]))
    _emit(args, report, header, (tuple(float(v) for v in r) for r in rows))


def cmd_pvaf(args):
    ts = _load(args)
    events = parse_events(args.events, args.rate, ts.start_time_ms)
    bands = _bands(args)
    batch = pvaf_batch(ts, events, bands, args.pad_ms, args.order)
    report = AnalysisReport(batch, _inputs(recording=args.recording, events=args.events),
                            _params(args))
    t = batch.table
    rows = [(str(i), *map(float, r)) for i, r in zip(batch.event_indices, t.per_event_pvaf)]
    rows.append(("median", *map(float, t.median_pvaf)))
    rows.append(("mad", *map(float, t.mad_pvaf)))
    _emit(args, report, ("event", *t.band_names), rows)


def cmd_mainseq(args):
    ts = _load(args)
    if args.detect:
        events = detect_saccades(velocity(ts), args.threshold, args.min_duration_ms)
        source = "detector (non-canonical threshold plumbing)"
    else:
        if not args.events:
            raise InputError("mainseq needs an events file or --detect")
        events = parse_events(args.events, args.rate, ts.start_time_ms)
        source = "annotations"
    cutoffs = args.cutoffs if args.cutoffs else DEFAULT_LOWPASS_CUTOFFS
    result = mainseq_analysis(ts, events, cutoffs, args.pad_ms, args.order,
                              event_source=source)
    report = AnalysisReport(result, _inputs(recording=args.recording, events=args.events),
                            _params(args))
    rows = []
    overlap = {o.condition_label: o.flags for o in result.overlap}
    for f in result.fits:
        flags = overlap.get(f.condition_label, {}) if f.model.value == "power_law" else {}
        rows.append((f.condition_label, f.model.value, *f.coeffs,
                     *(v for ci in f.ci95 for v in ci), f.adj_r2, f.n_points,
                     ";".join(f"{k}={v}" for k, v in flags.items())))
    header = ("condition", "model", "coef1", "coef2", "coef1_lo", "coef1_hi", "coef2_lo",
              "coef2_hi", "adj_r2", "n_points", "ci_overlap")
    _emit(args, report, header, rows)


def cmd_simulate_sampling(args):
    res = sweep_sampling(args.freq, args.n_per_period, args.trials, args.seed)
    report = AnalysisReport(res, {}, _params(args))
    rows = ((n, *(s[k] for k in SUMMARY_KEYS)) for n, s in zip(res.samples_per_period,
                                                                  res.summaries))
    _emit(args, report, ("n_per_period", *SUMMARY_KEYS), rows)


def cmd_min_rate(args):
    rate = min_sampling_rate(args.freq, args.domain)
    if args.out:
        report = AnalysisReport(MinRate(float(args.freq), args.domain, rate), {}, _params(args))
        _emit(args, report, ("max_signal_freq_hz", "domain", "rate_hz"),
              [(float(args.freq), args.domain, rate)])
    print(f"{rate:g}")


def cmd_synth_corpus(args):
    ts, events = saccade_corpus(
        n_saccades=args.n, amplitude_range=(args.amin, args.amax), rate_hz=args.rate,
        noise_rms_deg=args.noise_rms, noise_max_hz=args.noise_max_hz, seed=args.seed,
    )
    write_recording(args.recording_out, ts)
    write_events(args.events_out, events, args.rate)
    print(f"{len(events)} saccades, {len(ts)} samples")


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="eyeband", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("freq-response", parents=[common], help="filter magnitude responses")
    p.add_argument("--step", type=float, default=1.0, help="frequency grid step in Hz")
    p.add_argument("--fmax", type=float, default=None)
    p.set_defaults(func=cmd_freq_response)

    p = sub.add_parser("bands", parents=[common], help="band-decompose a recording")
    p.add_argument("recording")
    p.add_argument("--start", type=int, default=None, help="first sample index")
    p.add_argument("--end", type=int, default=None, help="last sample index (inclusive)")
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("pvaf", parents=[common], help="per-band variance attribution")
    p.add_argument("recording")
    p.add_argument("events")
    p.add_argument("--pad-ms", type=float, default=SNIPPET_PAD_MS)
    p.set_defaults(func=cmd_pvaf)

    p = sub.add_parser("mainseq", parents=[common], help="main sequence under low-pass filtering")
    p.add_argument("recording")
    p.add_argument("events", nargs="?")
    p.add_argument("--pad-ms", type=float, default=SNIPPET_PAD_MS)
    p.add_argument("--detect", action="store_true", help="use the threshold detector")
    p.add_argument("--threshold", type=float, default=30.0, help="deg/s, with --detect")
    p.add_argument("--min-duration-ms", type=float, default=10.0)
    p.set_defaults(func=cmd_mainseq)

    p = sub.add_parser("simulate-sampling", parents=[common], help="amplitude error vs N")
    p.add_argument("--freq", type=float, default=75.0)
    p.add_argument("--n-per-period", type=_floats, default=(2, 3, 4, 5, 6, 8, 10, 20, 50, 100))
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_simulate_sampling)

    p = sub.add_parser("min-rate", parents=[common], help="2x / 10x sampling rule")
    p.add_argument("--freq", type=float, required=True)
    p.add_argument("--domain", choices=("frequency", "time"), default="time")
    p.set_defaults(func=cmd_min_rate)

    p = sub.add_parser("synth-corpus", parents=[common], help="write a synthetic saccade corpus")
    p.add_argument("recording_out")
    p.add_argument("events_out")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--amin", type=float, default=0.5)
    p.add_argument("--amax", type=float, default=25.0)
    p.add_argument("--noise-rms", type=float, default=0.005)
    p.add_argument("--noise-max-hz", type=float, default=150.0)
    p.set_defaults(func=cmd_synth_corpus)
    return parser


def _fail(name, code, message):
    sys.stderr.write(json.dumps({"error": name, "code": code, "message": message}) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except EyebandError as exc:
        return _fail(type(exc).__name__, exc.code, str(exc))
    except OSError as exc:
        return _fail(type(exc).__name__, InputError.code, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
