"""Imprecise hidden Markov models with interval singleton assessments.

Every local model (marginal, transition row, emission row) is an
:class:`IntervalRow`: lower and upper probabilities for each singleton.  The
decoder evaluates them as the most conservative 2-monotone extension, so no
general credal-set representation is stored.

Positions are 1-indexed throughout: position 1 uses the marginal (a transition
out of a single dummy state), positions 2..n use transition rows indexed by
the previous state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from pathlib import Path
from typing import Iterable, Mapping, Sequence

SUM_TOL = 1e-12


class ModelError(ValueError):
    """Malformed model: wrong shapes, unknown labels, or bad file contents."""


class ModelValidationError(ModelError):
    """A model that parses but violates an interval-row rule."""

    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(str(report))


@dataclass(frozen=True)
class Alphabet:
    labels: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise ModelError("alphabet must be non-empty")
        if len(set(labels)) != len(labels):
            raise ModelError(f"alphabet labels must be unique: {labels!r}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ModelError(f"unknown symbol {label!r}") from None

    def label(self, i: int) -> str:
        return self.labels[i]

    @property
    def single_char(self) -> bool:
        return all(len(lab) == 1 for lab in self.labels)

    def encode(self, symbols: Iterable[str]) -> tuple[int, ...]:
        out = []
        for pos, sym in enumerate(symbols, start=1):
            if sym not in self._index:
                raise ModelError(f"unknown symbol {sym!r} at position {pos}")
            out.append(self._index[sym])
        return tuple(out)

    def decode(self, indices: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in indices)

    def join(self, indices: Iterable[int]) -> str:
        sep = "" if self.single_char else ","
        return sep.join(self.labels[i] for i in indices)

    def split(self, text: str) -> tuple[str, ...]:
        """Split an observation string: per character, or on commas."""
        text = text.strip()
        if "," in text or not self.single_char:
            return tuple(t.strip() for t in text.split(",") if t.strip())
        return tuple(text)


@dataclass(frozen=True)
class IntervalRow:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(self.lower))
        object.__setattr__(self, "upper", tuple(self.upper))
        if len(self.lower) != len(self.upper):
            raise ModelError(
                f"lower and upper have different lengths ({len(self.lower)} vs {len(self.upper)})"
            )
        for v in self.lower + self.upper:
            if not isinstance(v, Real) or isinstance(v, bool):
                raise ModelError(f"probabilities must be real numbers, got {v!r}")

    @classmethod
    def precise(cls, probs: Sequence) -> IntervalRow:
        return cls(tuple(probs), tuple(probs))

    def __len__(self) -> int:
        return len(self.lower)

    @property
    def is_precise(self) -> bool:
        return self.lower == self.upper

    def violations(self, strict: bool = False) -> list[tuple[int | None, str]]:
        """Rule violations as ``(index or None, message)`` pairs."""
        out: list[tuple[int | None, str]] = []
        for i, (lo, up) in enumerate(zip(self.lower, self.upper)):
            if not 0 <= lo <= 1:
                out.append((i, "lower must lie in [0, 1]"))
            if not 0 <= up <= 1:
                out.append((i, "upper must lie in [0, 1]"))
            if lo > up:
                out.append((i, "lower exceeds upper"))
            if not up > 0:
                out.append((i, "upper must be positive"))
        if sum(self.lower) > 1 + SUM_TOL:
            out.append((None, "sum of lowers exceeds 1"))
        if sum(self.upper) < 1 - SUM_TOL:
            out.append((None, "sum of uppers is below 1"))
        if strict and not out:
            total_lo, total_up = sum(self.lower), sum(self.upper)
            for i, (lo, up) in enumerate(zip(self.lower, self.upper)):
                if lo < 1 - (total_up - up) - SUM_TOL:
                    out.append((i, "lower is not reachable"))
                if up > 1 - (total_lo - lo) + SUM_TOL:
                    out.append((i, "upper is not reachable"))
        return out


@dataclass(frozen=True)
class Violation:
    table: str
    k: int | None
    given: str | None
    index: int | None
    rule: str

    def __str__(self) -> str:
        where = self.table
        if self.k is not None:
            where += f"[k={self.k}]"
        if self.given is not None:
            where += f"[given {self.given}]"
        if self.index is not None:
            where += f"[{self.index}]"
        return f"{where}: {self.rule}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


Table = tuple  # tuple[IntervalRow, ...], one row per conditioning state


@dataclass(frozen=True)
class ImpreciseHMM:
    """Finite imprecise HMM.

    ``transition`` and ``emission`` hold a single table when ``stationary``
    is true.  Otherwise ``transition`` has one table per position 2..n and
    ``emission`` one per position 1..n.  A table is a tuple of rows indexed
    by the conditioning state.
    """

    states: Alphabet
    outputs: Alphabet
    n: int
    marginal: IntervalRow
    transition: tuple
    emission: tuple
    stationary: bool = True

    def __post_init__(self):
        if not isinstance(self.states, Alphabet):
            object.__setattr__(self, "states", Alphabet(tuple(self.states)))
        if not isinstance(self.outputs, Alphabet):
            object.__setattr__(self, "outputs", Alphabet(tuple(self.outputs)))
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ModelError(f"chain length n must be an integer >= 1, got {self.n!r}")
        ns, no = len(self.states), len(self.outputs)
        if len(self.marginal) != ns:
            raise ModelError(f"marginal has {len(self.marginal)} entries, expected {ns}")
        if self.stationary:
            trans_tables = (tuple(self.transition),)
            emis_tables = (tuple(self.emission),)
            object.__setattr__(self, "transition", trans_tables[0])
            object.__setattr__(self, "emission", emis_tables[0])
        else:
            trans_tables = tuple(tuple(t) for t in self.transition)
            emis_tables = tuple(tuple(t) for t in self.emission)
            if len(trans_tables) != self.n - 1:
                raise ModelError(
                    f"non-stationary model needs {self.n - 1} transition tables, got {len(trans_tables)}"
                )
            if len(emis_tables) != self.n:
                raise ModelError(
                    f"non-stationary model needs {self.n} emission tables, got {len(emis_tables)}"
                )
            object.__setattr__(self, "transition", trans_tables)
            object.__setattr__(self, "emission", emis_tables)
        for name, tables, width in (
            ("transition", trans_tables, ns),
            ("emission", emis_tables, no),
        ):
            for table in tables:
                if len(table) != ns:
                    raise ModelError(f"{name} table has {len(table)} rows, expected {ns}")
                for row in table:
                    if not isinstance(row, IntervalRow):
                        raise ModelError(f"{name} rows must be IntervalRow instances")
                    if len(row) != width:
                        raise ModelError(f"{name} row has {len(row)} entries, expected {width}")

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_outputs(self) -> int:
        return len(self.outputs)

    def state_row(self, k: int, z_prev: int | None = None) -> IntervalRow:
        """Row of the local state model at position ``k`` (1..n)."""
        if k == 1:
            return self.marginal
        if self.stationary:
            return self.transition[z_prev]
        return self.transition[k - 2][z_prev]

    def emission_row(self, k: int, x: int) -> IntervalRow:
        if self.stationary:
            return self.emission[x]
        return self.emission[k - 1][x]

    def rows(self):
        """Yield ``(table, k, given_index, row)`` for every stored row."""
        yield "marginal", None, None, self.marginal
        if self.stationary:
            for z, row in enumerate(self.transition):
                yield "transition", None, z, row
            for x, row in enumerate(self.emission):
                yield "emission", None, x, row
        else:
            for t, table in enumerate(self.transition, start=2):
                for z, row in enumerate(table):
                    yield "transition", t, z, row
            for t, table in enumerate(self.emission, start=1):
                for x, row in enumerate(table):
                    yield "emission", t, x, row

    def is_precise(self) -> bool:
        return all(row.is_precise for _, _, _, row in self.rows())

    def with_length(self, n: int) -> ImpreciseHMM:
        """Same stationary tables, different chain length."""
        if not self.stationary:
            raise ModelError("only stationary models can change length")
        return ImpreciseHMM(
            self.states, self.outputs, n, self.marginal, self.transition, self.emission, True
        )

    def encode_obs(self, obs) -> tuple[int, ...]:
        """Map an observation (string or label sequence) to output indices."""
        if isinstance(obs, str):
            obs = self.outputs.split(obs)
        obs = tuple(obs)
        if obs and all(isinstance(o, int) and not isinstance(o, bool) for o in obs):
            if any(not 0 <= o < self.n_outputs for o in obs):
                raise ModelError("output index out of range")
            enc = obs
        else:
            enc = self.outputs.encode(obs)
        if len(enc) != self.n:
            raise ModelError(f"observation has length {len(enc)}, model expects n={self.n}")
        return enc


def validate(model: ImpreciseHMM, strict: bool = False) -> ValidationReport:
    """Check every row of the model against the interval-row rules.

    ``strict`` additionally requires each bound to be reachable (attained by
    some mass function in the interval credal set).
    """
    found = []
    for table, k, given, row in model.rows():
        if given is None:
            given_label = None
        elif table == "transition":
            given_label = model.states.label(given)
        else:
            given_label = model.states.label(given)
        for index, rule in row.violations(strict=strict):
            found.append(Violation(table, k, given_label, index, rule))
    return ValidationReport(tuple(found))


def _precise_row_errors(row: IntervalRow) -> list[str]:
    errs = []
    if not row.is_precise:
        errs.append("row is not precise")
    if any(not 0 <= p <= 1 for p in row.lower):
        errs.append("probabilities must lie in [0, 1]")
    if abs(sum(row.lower) - 1) > SUM_TOL:
        errs.append(f"row sums to {float(sum(row.lower))!r}, not 1")
    return errs


def check_precise(model: ImpreciseHMM) -> None:
    """Raise :class:`ModelError` unless every row is a probability mass function."""
    for table, k, given, row in model.rows():
        errs = _precise_row_errors(row)
        if errs:
            raise ModelError(f"{table} (k={k}, given={given}): {'; '.join(errs)}")


def _contaminate(row: IntervalRow, eps) -> IntervalRow:
    keep = 1 - eps
    lower = tuple(keep * p for p in row.lower)
    return IntervalRow(lower, tuple(lo + eps for lo in lower))


def linear_vacuous(
    precise: ImpreciseHMM, eps_marginal=0, eps_transition=0, eps_emission=0
) -> ImpreciseHMM:
    """Mix each precise row with the vacuous model: ``[(1-e)p, (1-e)p + e]``."""
    check_precise(precise)
    for name, eps in (
        ("eps_marginal", eps_marginal),
        ("eps_transition", eps_transition),
        ("eps_emission", eps_emission),
    ):
        if not 0 <= eps <= 1:
            raise ModelError(f"{name} must lie in [0, 1], got {eps!r}")

    def table(rows, eps):
        return tuple(_contaminate(r, eps) for r in rows)

    if precise.stationary:
        trans = table(precise.transition, eps_transition)
        emis = table(precise.emission, eps_emission)
    else:
        trans = tuple(table(t, eps_transition) for t in precise.transition)
        emis = tuple(table(t, eps_emission) for t in precise.emission)
    return ImpreciseHMM(
        precise.states,
        precise.outputs,
        precise.n,
        _contaminate(precise.marginal, eps_marginal),
        trans,
        emis,
        precise.stationary,
    )


def _count_vector(counts: Mapping | Sequence) -> list:
    values = list(counts.values()) if isinstance(counts, Mapping) else list(counts)
    for c in values:
        if c < 0:
            raise ValueError(f"counts must be non-negative, got {c!r}")
    return values


def idm_from_counts(counts: Mapping | Sequence, s=2) -> IntervalRow:
    """Imprecise Dirichlet model interval from category counts.

    ``lower = n_x / (s + N)`` and ``upper = (s + n_x) / (s + N)``.  Integer
    counts with an integer or Fraction ``s`` give exact Fractions.
    """
    if not s > 0:
        raise ValueError(f"IDM prior strength s must be positive, got {s!r}")
    values = _count_vector(counts)
    if isinstance(s, int):
        s = Fraction(s)
    total = s + sum(values)
    return IntervalRow(tuple(c / total for c in values), tuple((s + c) / total for c in values))


def perks_from_counts(counts: Mapping | Sequence, s=2) -> IntervalRow:
    """Precise Dirichlet estimate with Perks's prior: ``(s/|X| + n_x)/(s + N)``."""
    if not s > 0:
        raise ValueError(f"Perks prior strength s must be positive, got {s!r}")
    values = _count_vector(counts)
    if isinstance(s, int):
        s = Fraction(s)
    total = s + sum(values)
    share = s / len(values)
    return IntervalRow.precise(tuple((share + c) / total for c in values))


def precise_model(
    states, outputs, n: int, marginal, transition, emission, stationary: bool = True
) -> ImpreciseHMM:
    """Build a precise model (lower == upper) from plain probability tables."""

    def rows(table):
        return tuple(IntervalRow.precise(r) for r in table)

    if stationary:
        trans, emis = rows(transition), rows(emission)
    else:
        trans = tuple(rows(t) for t in transition)
        emis = tuple(rows(t) for t in emission)
    return ImpreciseHMM(
        Alphabet(tuple(states)),
        Alphabet(tuple(outputs)),
        n,
        IntervalRow.precise(marginal),
        trans,
        emis,
        stationary,
    )


def binary_model(m, r, s, p, q, n: int) -> ImpreciseHMM:
    """Precise binary stationary HMM over states/outputs ``"0"``, ``"1"``.

    ``m``: P(first state = 0); ``p``/``q``: P(next = 0 | current = 0/1);
    ``r``/``s``: P(output 0 | state 0/1).
    """
    return precise_model(
        ("0", "1"),
        ("0", "1"),
        n,
        (m, 1 - m),
        ((p, 1 - p), (q, 1 - q)),
        ((r, 1 - r), (s, 1 - s)),
    )


# -- model file format --------------------------------------------------------


def _dump_number(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return v
    return float(v)


def _load_number(v, where: str):
    if isinstance(v, bool):
        raise ModelError(f"{where}: expected a number, got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise ModelError(f"{where}: cannot parse {v!r} as a rational") from None
    raise ModelError(f"{where}: expected a number, got {v!r}")


def _dump_table(rows) -> dict:
    return {
        "lower": [[_dump_number(v) for v in r.lower] for r in rows],
        "upper": [[_dump_number(v) for v in r.upper] for r in rows],
    }


def model_to_dict(model: ImpreciseHMM) -> dict:
    out = {
        "states": list(model.states.labels),
        "outputs": list(model.outputs.labels),
        "n": model.n,
        "stationary": model.stationary,
        "marginal": {
            "lower": [_dump_number(v) for v in model.marginal.lower],
            "upper": [_dump_number(v) for v in model.marginal.upper],
        },
    }
    if model.stationary:
        out["transition"] = _dump_table(model.transition)
        out["emission"] = _dump_table(model.emission)
    else:
        out["transition"] = [_dump_table(t) for t in model.transition]
        out["emission"] = [_dump_table(t) for t in model.emission]
    return out


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise ModelError(f"{where}: expected an object")
    if key not in obj:
        raise ModelError(f"{where}: missing field {key!r}")
    return obj[key]


def _load_row(lower, upper, where: str) -> IntervalRow:
    if not isinstance(lower, list) or not isinstance(upper, list):
        raise ModelError(f"{where}: lower/upper must be lists")
    lo = tuple(_load_number(v, f"{where}.lower[{i}]") for i, v in enumerate(lower))
    up = tuple(_load_number(v, f"{where}.upper[{i}]") for i, v in enumerate(upper))
    if len(lo) != len(up):
        raise ModelError(f"{where}: lower has {len(lo)} entries but upper has {len(up)}")
    return IntervalRow(lo, up)


def _load_table(obj, where: str) -> tuple:
    lower = _require(obj, "lower", where)
    upper = _require(obj, "upper", where)
    if not isinstance(lower, list) or not isinstance(upper, list) or len(lower) != len(upper):
        raise ModelError(f"{where}: lower and upper must be lists of equal length")
    return tuple(
        _load_row(lo, up, f"{where}[{i}]") for i, (lo, up) in enumerate(zip(lower, upper))
    )


def model_from_dict(data: dict) -> ImpreciseHMM:
    """Parse the JSON object form of a model (no probability validation)."""
    states = _require(data, "states", "model")
    outputs = _require(data, "outputs", "model")
    n = _require(data, "n", "model")
    stationary = _require(data, "stationary", "model")
    if not isinstance(stationary, bool):
        raise ModelError("stationary: expected true or false")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ModelError("n: expected an integer")
    marg = _require(data, "marginal", "model")
    marginal = _load_row(
        _require(marg, "lower", "marginal"), _require(marg, "upper", "marginal"), "marginal"
    )
    tables = {}
    for name in ("transition", "emission"):
        raw = _require(data, name, "model")
        if stationary:
            if isinstance(raw, list):
                raise ModelError(f"{name}: stationary model must not contain per-k tables")
            tables[name] = _load_table(raw, name)
        else:
            if not isinstance(raw, list):
                raise ModelError(f"{name}: non-stationary model needs a list of per-k tables")
            tables[name] = tuple(_load_table(t, f"{name}[{i}]") for i, t in enumerate(raw))
    return ImpreciseHMM(
        Alphabet(tuple(states)),
        Alphabet(tuple(outputs)),
        n,
        marginal,
        tables["transition"],
        tables["emission"],
        stationary,
    )


def load_model(path, check: bool = True) -> ImpreciseHMM:
    """Read a JSON model file; validate it unless ``check`` is false."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    model = model_from_dict(data)
    if check:
        report = validate(model)
        if not report.ok:
            raise ModelValidationError(report)
    return model


def save_model(model: ImpreciseHMM, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")
