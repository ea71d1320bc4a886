#!/usr/bin/env python3
"""Verify every shipped degeneration certificate and tabulate the results.

Prints one line per certificate (verdict, tier, determinant valuation,
sampled parameters) followed by summary counts, so changes in the exact /
numeric split are easy to spot.

Examples:
    python scripts/degeneration_report.py
    python scripts/degeneration_report.py --mode numeric --truncation 24
    python scripts/degeneration_report.py --only "Z_14 -> Z_10" --json out.json
"""

import argparse
import json
import sys
from collections import Counter
from dataclasses import dataclass

from zinbiel5.catalog import certificates
from zinbiel5.degeneration import verify_certificate


@dataclass(frozen=True)
class ReportConfig:
    mode: str = "auto"
    trunc: int = 16
    precision: int = None
    only: str = ""
    json_path: str = ""


def parse_args(argv=None) -> ReportConfig:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mode", choices=("auto", "exact", "numeric"), default="auto")
    parser.add_argument("--truncation", type=int, default=16)
    parser.add_argument("--precision", type=int, default=None, help="numeric bits")
    parser.add_argument("--only", default="", help="substring filter on labels")
    parser.add_argument("--json", default="", help="also write results to this file")
    ns = parser.parse_args(argv)
    return ReportConfig(
        mode=ns.mode,
        trunc=ns.truncation,
        precision=ns.precision,
        only=ns.only,
        json_path=ns.json,
    )


def main(argv=None) -> int:
    config = parse_args(argv)
    rows = []
    verdicts = Counter()
    tiers = Counter()
    for cert in certificates():
        if config.only and config.only not in cert.label:
            continue
        report = verify_certificate(
            cert,
            mode=config.mode,
            trunc=config.trunc,
            precision=config.precision,
        )
        verdicts[report.verdict] += 1
        tiers[report.mode] += 1
        dets = sorted(
            {str(s.det_valuation) for s in report.samples if s.det_valuation is not None}
        )
        params = [
            "{" + ", ".join(f"{k}={v}" for k, v in s.params) + "}"
            for s in report.samples
            if s.params
        ]
        line = f"{cert.label:28s} {report.verdict:12s} {report.mode:8s}"
        line += f" det-val {','.join(dets) or '-':8s}"
        if params:
            line += " at " + " ".join(params)
        print(line)
        rows.append(
            {
                "label": cert.label,
                "verdict": report.verdict,
                "mode": report.mode,
                "det_valuations": dets,
                "samples": len(report.samples),
            }
        )
    total = sum(verdicts.values())
    print(f"\n{total} certificates:",
          " ".join(f"{k}={v}" for k, v in sorted(verdicts.items())),
          "| tiers:", " ".join(f"{k}={v}" for k, v in sorted(tiers.items())))
    if config.json_path:
        with open(config.json_path, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(f"wrote {config.json_path}")
    return 0 if total and verdicts.get("verified", 0) == total else 1


if __name__ == "__main__":
    sys.exit(main())
