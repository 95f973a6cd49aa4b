"""Edit-operation costs over birth-death intervals.

Two interchangeable models. The L-infinity model prices a relabel at the
cheaper of moving the point in the persistence diagram and routing both
points through the diagonal; removing a feature costs half its persistence.
The overhang model prices edits by the non-overlapping lengths of the two
bars; removing a feature costs its full persistence. Both satisfy the metric
axioms with the null label treated as an extra element.
"""

from __future__ import annotations

from enum import Enum


class CostModel(str, Enum):
    WINF = "winf"
    OVERHANG = "overhang"


def relabel_cost(model, p, q):
    db = abs(q.birth - p.birth)
    dd = abs(q.death - p.death)
    if model is CostModel.WINF:
        return min(max(db, dd), (p.persistence + q.persistence) / 2.0)
    if model is CostModel.OVERHANG:
        return min(db + dd, p.persistence + q.persistence)
    raise ValueError(f"unknown cost model {model!r}")


def delete_cost(model, p):
    if model is CostModel.WINF:
        return p.persistence / 2.0
    if model is CostModel.OVERHANG:
        return p.persistence
    raise ValueError(f"unknown cost model {model!r}")


def insert_cost(model, q):
    return delete_cost(model, q)


def edit_cost(model, p, q):
    """Cost of p -> q where either side may be None (the null label)."""
    if p is None and q is None:
        return 0.0
    if p is None:
        return insert_cost(model, q)
    if q is None:
        return delete_cost(model, p)
    return relabel_cost(model, p, q)
