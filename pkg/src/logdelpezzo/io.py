"""Chain description documents and report serialisation.

Rationals are written as "p/q" strings (integers as "n") so that every
emitted value round-trips exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .chain import AuxCurve, PointSpec
from .exact import format_rational, parse_rational
from .families import Pair, chain_divisor
from .picard import BaseSurface, PairBoundary
from .toric import NamedCase
from .volume import DivisorOver


class DocumentError(ValueError):
    """Malformed chain document; ``where`` names the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass(frozen=True)
class ChainDocument:
    base: BaseSurface
    boundary: PairBoundary
    aux: tuple[AuxCurve, ...]
    steps: tuple[PointSpec, ...]
    divisor_id: str = "chain"

    def pair(self) -> Pair:
        params = tuple((c.curve, c.coefficient) for c in self.boundary.components)
        curves = {c.id: c for c in self.aux}
        for comp in self.boundary.components:
            curves.setdefault(comp.curve, AuxCurve(comp.curve, comp.base_class))
        return Pair("custom", params, self.base, self.boundary, tuple(curves.values()))

    def divisor(self) -> DivisorOver:
        pair = self.pair()
        return chain_divisor(pair, self.aux, self.steps, self.divisor_id,
                             NamedCase("custom", "chain"))


def _field(data: Mapping, key: str, where: str, aliases: Sequence[str] = ()) -> Any:
    for k in (key, *aliases):
        if k in data:
            return data[k]
    raise DocumentError(where, f"missing field {key!r}")


def _int_list(value: Any, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool)
                                              for v in value):
        raise DocumentError(where, "expected a list of integers")
    return tuple(value)


def _rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise DocumentError(where, "rationals must be written as \"p/q\" strings")
    try:
        return parse_rational(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(where, str(exc)) from None


def _opt_index(value: Any, where: str) -> int | None:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise DocumentError(where, "expected a nonnegative integer or null")
    return value


def chain_from_dict(data: Mapping) -> ChainDocument:
    if not isinstance(data, Mapping):
        raise DocumentError("$", "the document must be a JSON object")
    b = _field(data, "base", "base")
    try:
        base = BaseSurface.from_dict(b if isinstance(b, Mapping) else {"kind": b})
    except (ValueError, KeyError) as exc:
        raise DocumentError("base", f"unknown base surface ({exc})") from None
    comps = []
    for i, c in enumerate(_field(data, "boundary", "boundary")):
        w = f"boundary[{i}]"
        comps.append((str(_field(c, "curve", w)), _int_list(_field(c, "class", w), f"{w}.class"),
                      _rational(_field(c, "coefficient", w), f"{w}.coefficient")))
    try:
        boundary = PairBoundary.of(*comps)
    except ValueError as exc:
        raise DocumentError("boundary", str(exc)) from None
    aux = []
    for i, c in enumerate(data.get("aux", [])):
        w = f"aux[{i}]"
        try:
            aux.append(AuxCurve(str(_field(c, "id", w)), _int_list(_field(c, "class", w), f"{w}.class")))
        except ValueError as exc:
            raise DocumentError(w, str(exc)) from None
    steps = []
    for i, s in enumerate(_field(data, "steps", "steps")):
        w = f"steps[{i}]"
        if not isinstance(s, Mapping):
            raise DocumentError(w, "expected an object")
        earlier = s.get("on_earlier_exceptional")
        if isinstance(earlier, list):
            earlier = [_opt_index(e, f"{w}.on_earlier_exceptional") for e in earlier]
        else:
            earlier = _opt_index(earlier, f"{w}.on_earlier_exceptional")
        mult = s.get("multiplicity", s.get("tangency", {}))
        if not isinstance(mult, Mapping):
            raise DocumentError(f"{w}.multiplicity", "expected an object of curve id -> integer")
        try:
            steps.append(PointSpec(
                on_previous_exceptional=_opt_index(s.get("on_previous_exceptional"),
                                                   f"{w}.on_previous_exceptional"),
                on_earlier_exceptional=earlier,
                on_aux=frozenset(str(x) for x in s.get("on_aux", [])),
                multiplicity={str(k): int(v) for k, v in mult.items()}))
        except ValueError as exc:
            raise DocumentError(w, str(exc)) from None
    if not steps:
        raise DocumentError("steps", "a chain needs at least one blowup")
    return ChainDocument(base, boundary, tuple(aux), tuple(steps), str(data.get("id", "chain")))


def chain_to_dict(doc: ChainDocument) -> dict:
    return {
        "id": doc.divisor_id,
        "base": doc.base.to_dict(),
        "boundary": [{"curve": c.curve, "class": list(c.base_class),
                      "coefficient": format_rational(c.coefficient)}
                     for c in doc.boundary.components],
        "aux": [{"id": c.id, "class": list(c.base_class)} for c in doc.aux],
        "steps": [{"on_previous_exceptional": s.on_previous_exceptional,
                   "on_earlier_exceptional": s.on_earlier_exceptional,
                   "on_aux": sorted(s.on_aux),
                   "multiplicity": dict(s.multiplicity)} for s in doc.steps],
    }


def loads_chain(text: str) -> ChainDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return chain_from_dict(data)


def dumps_chain(doc: ChainDocument) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(chain_to_dict(doc), sort_keys=True, indent=2) + "\n"


def load_chain(path: str) -> ChainDocument:
    with open(path, encoding="utf-8") as fh:
        return loads_chain(fh.read())


def chain_document_for(pair: Pair, divisor: DivisorOver) -> ChainDocument:
    """Document reproducing a divisor built by the family helpers."""
    prof = divisor.profile
    if prof is None:
        raise ValueError(f"{divisor.id} is not an exceptional divisor of a chain")
    return ChainDocument(pair.base, pair.boundary, tuple(prof.aux), tuple(prof.steps), divisor.id)


# ----------------------------------------------------------------------------
# reports

def _cell(v: Any) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, bool):
        return str(v).lower()
    return "" if v is None else str(v)


def rows_to_csv(rows: Iterable[Mapping[str, Any]], columns: Sequence[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = []
        for r in rows:
            for k in r:
                if k not in columns:
                    columns.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(r.get(k)) for k in columns})
    return buf.getvalue()


def rows_to_json(rows: Iterable[Mapping[str, Any]], **meta: Any) -> str:
    body = {k: _cell(v) if not isinstance(v, (list, dict)) else v for k, v in meta.items()}
    body["rows"] = [{k: _cell(v) for k, v in r.items()} for r in rows]
    return json.dumps(body, sort_keys=True, indent=2) + "\n"

