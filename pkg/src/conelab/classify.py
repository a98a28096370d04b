"""Simple-algebra dimension table and the exact reconstruction decision
procedures: which families of simple algebras admit locally tomographic,
injective, or classicality-compatible composites with themselves.

All arithmetic is over plain integers; derivation traces are first-class
outputs recording, for every examined member, the forced rank, the required
dimension, the candidate records, and the eliminating inequality.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

FAMILIES = ("RealSym", "ComplexHerm", "QuatHerm", "SpinFactor", "Albert")

LOCAL_TOMOGRAPHY = "local-tomography"
INJECTIVE_COMPOSITE = "injective-composite"
CLASSICALITY = "classicality"


@dataclass(frozen=True, order=True)
class ClassRecord:
    family: str
    rank: int
    dim: int


def dim_of(family: str, rank: int, spin_dim: int | None = None) -> int:
    """Dimension of the simple algebra of the given family and rank."""
    if rank < 1:
        raise ValueError("rank must be positive")
    if family == "RealSym":
        return rank * (rank + 1) // 2
    if family == "ComplexHerm":
        return rank * rank
    if family == "QuatHerm":
        return rank * (2 * rank - 1)
    if family == "SpinFactor":
        if rank != 2:
            raise ValueError("spin factors have rank 2")
        if spin_dim is None or spin_dim < 2:
            raise ValueError("spin factors need a dimension parameter >= 2")
        return spin_dim
    if family == "Albert":
        if rank != 3:
            raise ValueError("the exceptional algebra has rank 3")
        return 27
    raise ValueError(f"unknown family: {family}")


def make_record(family: str, rank: int, spin_dim: int | None = None) -> ClassRecord:
    return ClassRecord(family, rank, dim_of(family, rank, spin_dim))


def records_with_rank(rank: int, max_dim: int = 10000) -> list[ClassRecord]:
    """All simple records of the exact given rank with dim <= max_dim."""
    out = []
    for family in ("RealSym", "ComplexHerm", "QuatHerm"):
        d = dim_of(family, rank)
        if d <= max_dim:
            out.append(ClassRecord(family, rank, d))
    if rank == 2:
        out.extend(ClassRecord("SpinFactor", 2, n)
                   for n in range(2, max_dim + 1))
    if rank == 3:
        out.append(ClassRecord("Albert", 3, 27))
    return sorted(out, key=lambda c: (c.dim, c.family))


def family_members(family: str, max_rank: int) -> list[ClassRecord]:
    """The members each procedure must examine.  Spin dimensions are bounded
    by 4*max_rank**4, which covers every dimension that could still satisfy
    dim >= d**2 against rank-4 candidates."""
    if family == "SpinFactor":
        return [ClassRecord("SpinFactor", 2, n)
                for n in range(2, 4 * max_rank**4 + 1)]
    if family == "Albert":
        return [ClassRecord("Albert", 3, 27)]
    return [make_record(family, r) for r in range(2, max_rank + 1)]


def _cell(member: ClassRecord, relation: str) -> dict:
    required_rank = member.rank ** 2
    required_dim = member.dim ** 2
    cands = records_with_rank(required_rank)
    if relation == "==":
        hits = [c for c in cands if c.dim == required_dim]
    else:
        hits = [c for c in cands if c.dim >= required_dim]
    out = {
        "member": asdict(member),
        "required_rank": required_rank,
        "required_dim": required_dim,
        "relation": relation,
        "candidates": [asdict(c) for c in cands],
        "pass": bool(hits),
    }
    if hits:
        out["witness"] = asdict(hits[0])
    else:
        dims = [c.dim for c in cands]
        out["reason"] = (f"no simple record of rank {required_rank} has "
                         f"dim {relation} {required_dim}; available dims "
                         f"are {dims}")
    return out


def _run(procedure: str, max_rank: int, num_summands: int | None = None) -> dict:
    if max_rank < 2:
        raise ValueError("max_rank must be at least 2")
    relation = "==" if procedure == LOCAL_TOMOGRAPHY else ">="
    families = {}
    survivors = []
    for family in FAMILIES:
        cells = [_cell(m, relation) for m in family_members(family, max_rank)]
        ok = all(c["pass"] for c in cells)
        families[family] = {"survives": ok, "cells": cells}
        if ok:
            survivors.append(family)
    out = {
        "procedure": procedure,
        "max_rank": max_rank,
        "families": families,
        "survivors": survivors,
    }
    if procedure == CLASSICALITY:
        out["num_summands"] = num_summands
        out["reduction"] = (
            "a classical effect on a direct sum of copies of a simple "
            "algebra restricts to a summand unit, so the constraint on the "
            "simple summand is the same for every summand count")
        out["near_miss"] = near_miss_record()
    return out


def near_miss_record() -> dict:
    """Why rank and dimension counting alone cannot finish the argument:
    three exceptional summands reproduce the parameters of a simple complex
    matrix algebra."""
    return {
        "summands": 3,
        "summand": asdict(ClassRecord("Albert", 3, 27)),
        "total_rank": 81,
        "total_dim": 81,
        "coincides_with": asdict(ClassRecord("ComplexHerm", 81, 6561)),
        "note": ("three exceptional summands give a state space whose "
                 "rank and squared dimension match the rank-81 complex "
                 "matrix algebra exactly; rank and dimension counting "
                 "alone cannot separate them"),
    }


def survivors_local_tomography(max_rank: int) -> dict:
    """Families whose every member admits a simple composite of rank exactly
    r**2 and dimension exactly d**2."""
    return _run(LOCAL_TOMOGRAPHY, max_rank)


def survivors_injective_composite(max_rank: int) -> dict:
    """Relaxed constraint: some simple record of rank r**2 has dimension at
    least d**2."""
    return _run(INJECTIVE_COMPOSITE, max_rank)


def survivors_classicality(max_rank: int, num_summands: int) -> dict:
    """Direct sums of num_summands copies of a simple member: the classical
    unit effect pins the composite summand, giving the same per-member
    constraint as the injective case for every summand count."""
    if num_summands < 1:
        raise ValueError("num_summands must be at least 1")
    return _run(CLASSICALITY, max_rank, num_summands)


def trace_json(trace: dict) -> str:
    return json.dumps(trace, indent=2, sort_keys=True)


def trace_text(trace: dict, max_cells_per_family: int = 6) -> str:
    """Plain-text derivation, elided for very long member lists."""
    lines = [f"procedure: {trace['procedure']} (max_rank={trace['max_rank']})"]
    if trace["procedure"] == CLASSICALITY:
        lines.append(f"summand count: {trace['num_summands']} "
                     f"(constraint independent of it: {trace['reduction']})")
    for family, info in trace["families"].items():
        verdict = "survives" if info["survives"] else "eliminated"
        lines.append(f"{family}: {verdict}")
        shown = info["cells"]
        elided = 0
        if len(shown) > max_cells_per_family:
            failing = [c for c in shown if not c["pass"]]
            keep = shown[:max_cells_per_family]
            if failing and failing[0] not in keep:
                keep = shown[:max_cells_per_family - 1] + failing[:1]
            elided = len(shown) - len(keep)
            shown = keep
        for c in shown:
            m = c["member"]
            head = (f"  rank {m['rank']} dim {m['dim']}: needs rank "
                    f"{c['required_rank']}, dim {c['relation']} "
                    f"{c['required_dim']}")
            if c["pass"]:
                w = c["witness"]
                lines.append(f"{head} -> ok via {w['family']} "
                             f"(dim {w['dim']})")
            else:
                lines.append(f"{head} -> FAIL: {c['reason']}")
        if elided:
            lines.append(f"  ... {elided} further members elided")
    lines.append("survivors: " + ", ".join(trace["survivors"]))
    if "near_miss" in trace:
        nm = trace["near_miss"]
        lines.append(f"near miss on record counting alone: {nm['summands']} "
                     f"x {nm['summand']['family']} has rank "
                     f"{nm['total_rank']} and squared dimension "
                     f"{nm['coincides_with']['dim']}, {nm['note']}")
    return "\n".join(lines)
