"""
Per-trial outcome records and their CSV form
"""

import csv
import io
from dataclasses import dataclass

from core.errors import MalformedRecords

RECORD_FORMAT = "%.10g"


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    snr: float
    bob_correct: bool
    eve_correct: dict
    unitarity_dev: float
    cov_offdiag_ratio: float
    resample_count: int
    wall_time: float = 0.0


def record_header(attacks):
    return (["trial_id", "snr", "bob_correct"]
            + [f"eve_{name}" for name in attacks]
            + ["unitarity_dev", "cov_offdiag_ratio", "resample_count"])


def dumps_records(records, attacks):
    """
    CSV text for a list of records, sorted by trial id.

    Wall time is left out so that repeated runs produce identical files.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(record_header(attacks))
    for r in sorted(records, key=lambda r: r.trial_id):
        writer.writerow(
            [r.trial_id, RECORD_FORMAT % r.snr, int(r.bob_correct)]
            + [int(r.eve_correct[name]) for name in attacks]
            + [RECORD_FORMAT % r.unitarity_dev, RECORD_FORMAT % r.cov_offdiag_ratio,
               r.resample_count]
        )
    return out.getvalue()


def loads_records(text):
    """Parse records CSV; returns (records, attack names)"""
    reader = csv.DictReader(io.StringIO(text))
    attacks = [name[len("eve_"):] for name in (reader.fieldnames or [])
               if name.startswith("eve_")]
    records = []
    for row in reader:
        try:
            records.append(TrialRecord(
                trial_id=int(row["trial_id"]),
                snr=float(row["snr"]),
                bob_correct=row["bob_correct"] == "1",
                eve_correct={name: row[f"eve_{name}"] == "1" for name in attacks},
                unitarity_dev=float(row["unitarity_dev"]),
                cov_offdiag_ratio=float(row["cov_offdiag_ratio"]),
                resample_count=int(row["resample_count"]),
            ))
        except KeyError as e:
            raise MalformedRecords(f"records are missing column {e}") from e
        except (TypeError, ValueError) as e:
            raise MalformedRecords(f"record on line {reader.line_num}: {e}") from e
    return records, attacks
