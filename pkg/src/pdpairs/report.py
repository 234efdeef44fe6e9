"""Report rendering: human-readable text and the stable JSON schema.

JSON reports carry the keys {status, degree_certificates, sign_table,
witnesses, timings}; everything except timings is deterministic for a given
input, and the catalog tests pin that down.
"""

from __future__ import annotations

import json

from .pairs import LadderReport, PDVerdict


def homology_table(int_complex):
    return {str(d): h.describe() for d, h in
            sorted(int_complex.all_homology().items())}


def verdict_report(verdict: PDVerdict, ladder: LadderReport | None = None,
                   timings: dict | None = None) -> dict:
    data = verdict.to_json_dict()
    sign_table = []
    if ladder is not None:
        for sq in ladder.squares:
            sign_table.append({"square": sq.name,
                               "sign": sq.sign if sq.sign is not None else 0,
                               "status": sq.status,
                               "method": sq.method})
    return {
        "status": data["status"],
        "reason": data["reason"],
        "fundamental_class": data["fundamental_class"],
        "class_degree": data["class_degree"],
        "degree_certificates": data["degree_certificates"],
        "boundary_classes": data["boundary_classes"],
        "sign_table": sign_table,
        "witnesses": data["witnesses"],
        "witness_kind": data["witness_kind"],
        "timings": timings or {},
    }


def to_json(data: dict) -> str:
    def default(x):
        return str(x)
    return json.dumps(data, indent=2, sort_keys=True, default=default)


def render_verdict_text(name: str, verdict: PDVerdict,
                        ladder: LadderReport | None = None) -> str:
    lines = []
    badge = verdict.status.upper()
    lines.append(f"verify {name}: {badge}")
    if verdict.reason:
        lines.append(f"  reason: {verdict.reason}")
    if verdict.fundamental_class is not None:
        lines.append(f"  fundamental class (degree {verdict.class_degree}): "
                     f"{verdict.fundamental_class}")
    for comp, vec in sorted(verdict.boundary_classes.items()):
        lines.append(f"  boundary class [{comp}]: {list(vec)}")
    if verdict.witness_kind:
        lines.append(f"  certificate: {verdict.witness_kind}")
    for cert in verdict.certificates:
        lines.append(f"    degree {cert['degree']}: cone homology "
                     f"{cert['cone_homology']} ({cert['method']})")
    if ladder is not None:
        lines.append(f"  ladder: {ladder.status}")
        for sq in ladder.squares:
            sign = f"{sq.sign:+d}" if sq.sign is not None else "??"
            lines.append(f"    square {sq.name}: {sq.status} "
                         f"(sign {sign}, {sq.method})")
    return "\n".join(lines)


def render_homology_text(name: str, tables: dict) -> str:
    lines = [f"homology {name}:"]
    for label, table in tables.items():
        lines.append(f"  {label}:")
        for deg, desc in table.items():
            lines.append(f"    H_{deg} = {desc}")
    return "\n".join(lines)


def render_nu_text(name: str, nu, verdict) -> str:
    lines = [f"nu {name}:"]
    lines.append(f"  F^2 generators: {nu.source.ngens}; ideal generators: "
                 f"{nu.target.ngens}")
    lines.append(f"  raw images: {[str(r) for r in nu.raw_images]}")
    lines.append(f"  matrix over ideal generators: {nu.matrix_pretty()}")
    status = "homotopy-equivalence" if verdict.is_equivalence() \
        else verdict.status
    lines.append(f"  derived verdict: {status}"
                 + (f" ({verdict.reason})" if verdict.reason else ""))
    return "\n".join(lines)


def nu_report(nu, verdict, timings=None) -> dict:
    return {
        "status": "homotopy-equivalence" if verdict.is_equivalence()
        else verdict.status,
        "raw_images": [str(r) for r in nu.raw_images],
        "matrix": nu.matrix_pretty(),
        "source_generators": nu.source.ngens,
        "ideal_generators": nu.target.ngens,
        "degree_certificates": [],
        "sign_table": [],
        "witnesses": (nu.verdict.inverse.matrix.pretty()
                      if nu.verdict and nu.verdict.inverse else None),
        "timings": timings or {},
    }
