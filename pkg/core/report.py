"""
Error-rate reports for experiment records

SER is the block error rate: the fraction of trials whose decoded message
differs from the transmitted one. Grid values follow the experiment's noise
reference (P/σ² per real dimension, or C·d_min/σ); larger values mean less noise.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field

from scipy.stats import norm

from core.errors import EmptyInput, InsufficientTrials

logger = logging.getLogger(__name__)

REPORT_HEADER = ["snr", "party", "attack", "ser", "ci_lo", "ci_hi", "trials"]
REPORT_FORMAT = "%.10g"
RATIO_SENTINEL = "inf"


@dataclass(frozen=True)
class SerEstimate:
    errors: int
    trials: int
    ci_lo: float
    ci_hi: float

    @property
    def ser(self):
        return self.errors / self.trials

    @property
    def width(self):
        return self.ci_hi - self.ci_lo


@dataclass
class PointVerdict:
    snr: float
    bob: SerEstimate
    eve: SerEstimate
    best_attack: str
    ratio: float
    proxy_fraction: float
    passed: bool = True
    reasons: list = field(default_factory=list)

    @property
    def ratio_text(self):
        return RATIO_SENTINEL if math.isinf(self.ratio) else REPORT_FORMAT % self.ratio


@dataclass
class AsymmetryReport:
    points: list
    diagnostics: list = field(default_factory=list)
    monotone: bool = True

    @property
    def passed(self):
        return all(point.passed for point in self.points) and not any(
            d.startswith("no asymmetry") for d in self.diagnostics)

    @property
    def exit_status(self):
        return 0 if self.passed else 2


def wilson_interval(errors, trials, confidence=0.95):
    """Wilson score interval for an error proportion"""
    if trials <= 0:
        raise EmptyInput("cannot form an interval from zero trials")
    z = norm.ppf(0.5 + confidence / 2)
    phat = errors / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return lo, hi


def estimate(outcomes):
    """SerEstimate from an iterable of 'decoded correctly' flags"""
    outcomes = list(outcomes)
    errors = sum(1 for ok in outcomes if not ok)
    lo, hi = wilson_interval(errors, len(outcomes))
    return SerEstimate(errors=errors, trials=len(outcomes), ci_lo=lo, ci_hi=hi)


def attacks_of(records):
    names = []
    for record in records:
        for name in record.eve_correct:
            if name not in names:
                names.append(name)
    return names


def _grid_key(value):
    """Grid values as written to records.csv; reloaded records only match at this precision"""
    return REPORT_FORMAT % value


def group_by_snr(records, grid=None):
    groups = {}
    for record in sorted(records, key=lambda r: r.trial_id):
        groups.setdefault(_grid_key(record.snr), (record.snr, []))[1].append(record)
    if not grid:
        return [groups[key] for key in sorted(groups, key=lambda key: groups[key][0])]
    return [(value, groups[_grid_key(value)][1]) for value in grid if _grid_key(value) in groups]


def summarize(records, config=None):
    """Per-point error counts for summary.json"""
    if not records:
        raise EmptyInput("no records to summarize")
    attacks = list(config.attacks) if config else attacks_of(records)
    grid = list(config.snr_grid) if config else None
    points = []
    for value, group in group_by_snr(records, grid):
        bob = estimate(r.bob_correct for r in group)
        eve = {name: estimate(r.eve_correct[name] for r in group) for name in attacks}
        points.append({
            "snr": value,
            "trials": len(group),
            "bob_ser": bob.ser,
            "eve_ser": {name: est.ser for name, est in eve.items()},
            "resamples": sum(r.resample_count for r in group),
        })
    wall = sum(r.wall_time for r in records)
    return {
        "noise_reference": config.noise_reference if config else None,
        "attacks": attacks,
        "points": points,
        "timing": {"total_trial_seconds": wall, "mean_trial_seconds": wall / len(records)},
    }


def sweep_rows(records, attacks=None, grid=None):
    """(snr, party, attack, SerEstimate) rows; bob first at every grid value"""
    if not records:
        raise EmptyInput("no records to report")
    attacks = list(attacks) if attacks is not None else attacks_of(records)
    rows = []
    for value, group in group_by_snr(records, grid):
        rows.append((value, "bob", "-", estimate(r.bob_correct for r in group)))
        for name in attacks:
            rows.append((value, "eve", name, estimate(r.eve_correct[name] for r in group)))
    return rows


def sweep_report(records, attacks=None, grid=None):
    """Return (report CSV text, plot-data text)"""
    rows = sweep_rows(records, attacks, grid)

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for value, party, attack, est in rows:
        writer.writerow([REPORT_FORMAT % value, party, attack, REPORT_FORMAT % est.ser,
                         REPORT_FORMAT % est.ci_lo, REPORT_FORMAT % est.ci_hi, est.trials])
    return out.getvalue(), plot_data(rows)


def plot_data(rows):
    """gnuplot data blocks, one per party/attack series, separated by two blank lines"""
    series = {}
    for value, party, attack, est in rows:
        label = party if party == "bob" else f"{party}:{attack}"
        series.setdefault(label, []).append((value, est))
    blocks = []
    for label, points in series.items():
        lines = [f"# {label}", "# snr ser ci_lo ci_hi"]
        for value, est in points:
            lines.append(" ".join(REPORT_FORMAT % v for v in (value, est.ser, est.ci_lo, est.ci_hi)))
        blocks.append("\n".join(lines))
    return "\n\n\n".join(blocks) + "\n"


def proxy_passes(record, acceptance):
    return (record.unitarity_dev > acceptance.unitarity_min
            and record.cov_offdiag_ratio > acceptance.offdiag_min)


def _ratio(eve_ser, bob_ser):
    if bob_ser == 0:
        return math.inf if eve_ser > 0 else 0.0
    return eve_ser / bob_ser


def validate_asymmetry(records, acceptance, attacks=None, grid=None):
    """
    Check the eavesdropper disadvantage at the gated grid points.

    Eve's error rate is the best (lowest) over the attacks. Raises
    InsufficientTrials when Eve's interval is wider than the gap between her
    error rate and the required multiple of Bob's.
    """
    attacks = list(attacks) if attacks is not None else attacks_of(records)
    if not records:
        raise EmptyInput("no records to validate")
    if not attacks:
        raise EmptyInput("records carry no eavesdropper outcomes")

    report = AsymmetryReport(points=[])
    if not any(r.unitarity_dev > 0 or r.cov_offdiag_ratio > 0 for r in records):
        report.diagnostics.append(
            "no asymmetry: every eavesdropper channel is indistinguishable from the receiver's")

    gated = {_grid_key(v) for v in acceptance.points} if acceptance.points else None
    groups = group_by_snr(records, grid)
    for value, group in groups:
        if gated is not None and _grid_key(value) not in gated:
            continue
        bob = estimate(r.bob_correct for r in group)
        per_attack = {name: estimate(r.eve_correct[name] for r in group) for name in attacks}
        best = min(attacks, key=lambda name: per_attack[name].errors)
        eve = per_attack[best]
        proxy = sum(1 for r in group if proxy_passes(r, acceptance)) / len(group)
        verdict = PointVerdict(snr=value, bob=bob, eve=eve, best_attack=best,
                               ratio=_ratio(eve.ser, bob.ser), proxy_fraction=proxy)

        if not report.diagnostics:
            gap = abs(eve.ser - acceptance.min_ratio * bob.ser)
            if eve.width > gap:
                raise InsufficientTrials(
                    f"at {value:g}: eavesdropper interval width {eve.width:.4g} exceeds the "
                    f"gap {gap:.4g}; increase trials_per_point")

        if verdict.ratio < acceptance.min_ratio:
            verdict.reasons.append(f"ratio {verdict.ratio_text} below {acceptance.min_ratio:g}")
        if proxy < acceptance.proxy_fraction:
            verdict.reasons.append(
                f"proxy fraction {proxy:.3f} below {acceptance.proxy_fraction:g}")
        if acceptance.max_bob_ser is not None and bob.ser > acceptance.max_bob_ser:
            verdict.reasons.append(f"receiver SER {bob.ser:.4g} above {acceptance.max_bob_ser:g}")
        verdict.passed = not verdict.reasons
        report.points.append(verdict)

    if not report.points:
        raise EmptyInput("no records at the gated grid points")

    report.monotone = _check_monotone(groups, report)
    for point in report.points:
        logger.info("Point %g: bob %.4g, eve %.4g (%s), ratio %s, %s", point.snr, point.bob.ser,
                    point.eve.ser, point.best_attack, point.ratio_text,
                    "pass" if point.passed else "; ".join(point.reasons))
    return report


def _check_monotone(groups, report):
    """Receiver SER should not rise with the grid value; one overlapping bump is tolerated"""
    estimates = [(value, estimate(r.bob_correct for r in group))
                 for value, group in sorted(groups, key=lambda g: g[0])]
    bumps = 0
    strict = False
    for (v0, e0), (v1, e1) in zip(estimates, estimates[1:]):
        if e1.ser > e0.ser:
            bumps += 1
            if e1.ci_lo > e0.ci_hi:
                strict = True
                report.diagnostics.append(
                    f"receiver SER rises from {e0.ser:.4g} at {v0:g} to {e1.ser:.4g} at {v1:g}")
    if bumps > 1 and not strict:
        report.diagnostics.append(f"receiver SER rises {bumps} times along the grid")
    return not strict and bumps <= 1
