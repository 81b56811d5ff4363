"""Seeded random surveys of the three orthogonality relations.

Every sample draws from its own generator, seeded by ``(seed, space index,
stream, sample index)``, so a report depends only on the configuration and
never on evaluation order.  Truth assignments are keyed by the letters of
``(strong, quasi, bj)``; ``"TFF"`` means strong holds and the others fail.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

from .constructions import make_prime_pair, make_quasi_pair, make_sqc_pair
from .errors import BJOError, CommutativeAlgebra, ConfigError, NotEnoughBlocks
from .interchange import ProblemFile
from .module import ModuleSpace
from .numrange import Answer
from .orthogonality import Relation, classify_pair
from .sampling import ELEMENT_KINDS, KINDS, kind_applies, sample_element, spawn_rng
from .tolerances import DEFAULT, Tolerances

ORDER = (Relation.STRONG, Relation.QUASI, Relation.BJ)
ASSIGNMENTS = tuple(a + b + c for a in "TF" for b in "TF" for c in "TF")
PAIRS = {
    "strong~quasi": (Relation.STRONG, Relation.QUASI),
    "quasi~bj": (Relation.QUASI, Relation.BJ),
    "strong~bj": (Relation.STRONG, Relation.BJ),
}
STREAM_RANDOM, STREAM_ENRICHED, STREAM_SQC, STREAM_PRIME = range(4)
MAX_EXHIBITS = 3
BORDERLINE_LIMIT = 0.01


def default_family() -> list[ModuleSpace]:
    """C, C^2, C^3, M2, M3, C+M2, M2+M2 and M_{3x2} over M2."""
    dims = [(1,), (1, 1), (1, 1, 1), (2,), (3,), (1, 2), (2, 2)]
    return [ModuleSpace.of(d) for d in dims] + [ModuleSpace.of((2,), (3,))]


def space_to_dict(space: ModuleSpace) -> dict:
    return {"name": str(space), "blocks": list(space.algebra.block_dims), "rows": list(space.row_dims)}


def space_from_dict(d) -> ModuleSpace:
    if not isinstance(d, dict) or "blocks" not in d:
        raise ConfigError(f"space entry needs a 'blocks' list, got {d!r}")
    return ModuleSpace.of(tuple(d["blocks"]), None if d.get("rows") is None else tuple(d["rows"]))


@dataclass(frozen=True)
class EnsembleConfig:
    spaces: Sequence[ModuleSpace]
    samples_per_space: int
    seed: int = 0
    element_kinds: Sequence[str] = ("ginibre", "unitary-column", "positive", "quasi-enriched")
    tolerances: Tolerances = DEFAULT
    enriched_per_space: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "spaces", tuple(self.spaces))
        object.__setattr__(self, "element_kinds", tuple(self.element_kinds))
        if not self.spaces:
            raise ConfigError("at least one space is required")
        if int(self.samples_per_space) < 1:
            raise ConfigError(f"samples_per_space must be >= 1, got {self.samples_per_space}")
        if not self.element_kinds:
            raise ConfigError("element_kinds must not be empty")
        bad = [k for k in self.element_kinds if k not in KINDS]
        if bad:
            raise ConfigError(f"unknown element kinds {bad}; choose from {KINDS}")
        if self.enriched_per_space is not None and self.enriched_per_space < 0:
            raise ConfigError("enriched_per_space must be >= 0")
        if not 0 <= int(self.seed) < 1 << 64:
            raise ConfigError("seed must fit in 64 bits")

    @property
    def enriched(self) -> int:
        if "quasi-enriched" not in self.element_kinds:
            return 0
        if self.enriched_per_space is not None:
            return int(self.enriched_per_space)
        return max(1, self.samples_per_space // 10)

    def kinds_for(self, space: ModuleSpace) -> list[str]:
        kinds = [k for k in self.element_kinds if k in ELEMENT_KINDS and kind_applies(space, k)]
        if not kinds:
            # enrichment alone still needs a base ensemble
            kinds = ["ginibre"]
        return kinds

    def to_dict(self) -> dict:
        return {
            "spaces": [space_to_dict(s) for s in self.spaces],
            "samples_per_space": int(self.samples_per_space),
            "enriched_per_space": self.enriched,
            "seed": int(self.seed),
            "element_kinds": list(self.element_kinds),
            "tolerances": self.tolerances.as_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        tol = d.get("tolerances") or {}
        try:
            tolerances = Tolerances(**{**DEFAULT.as_dict(), **tol})
        except TypeError as exc:
            raise ConfigError(f"bad tolerances: {exc}") from None
        spaces = [space_from_dict(s) for s in d.get("spaces", [])] if "spaces" in d else default_family()
        return cls(
            spaces=spaces,
            samples_per_space=d.get("samples_per_space", 100),
            seed=d.get("seed", 0),
            element_kinds=d.get("element_kinds", cls.element_kinds),
            tolerances=tolerances,
            enriched_per_space=d.get("enriched_per_space"),
        )


@dataclass
class SurveyReport:
    survey: str
    config: dict
    spaces: list
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "survey": self.survey,
            "assignment_order": [r.value for r in ORDER],
            "config": self.config,
            "spaces": self.spaces,
            "violations": self.violations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False)

    def csv_rows(self) -> list[list]:
        header = ["survey", "space", "blocks", "rows", "samples", "certified", "borderline",
                  "borderline_rate", "errors", "chain_violations", *ASSIGNMENTS, *PAIRS]
        extra = []
        if any("flags" in s for s in self.spaces):
            extra = [f"flag:{p}" for p in PAIRS] + [f"predicted:{p}" for p in PAIRS] + ["pattern_match"]
        rows = [header + extra]
        for s in self.spaces:
            row = [self.survey, s["space"]["name"], ",".join(map(str, s["space"]["blocks"])),
                   ",".join(map(str, s["space"]["rows"])), s["samples"], s["certified"], s["borderline"],
                   repr(s["borderline_rate"]), s["errors"], s["chain_violations"],
                   *(s["counts"][a] for a in ASSIGNMENTS), *(s["disagreements"][p] for p in PAIRS)]
            if extra:
                row += [s["flags"][p] for p in PAIRS] + [s["predicted"][p] for p in PAIRS] + [s["pattern_match"]]
            rows.append(row)
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        csv.writer(buf).writerows(self.csv_rows())
        return buf.getvalue()


def _key(verdicts) -> str:
    return "".join("T" if verdicts[r].holds else "F" for r in ORDER)


def _exhibit(space, x, y, verdicts, **where) -> dict:
    return {
        **where,
        "verdicts": {r.value: verdicts[r].answer.value for r in ORDER},
        "problem": ProblemFile(space, x, y).to_dict(),
    }


def _draw(config, si, space, stream, idx, kinds):
    rng = spawn_rng(config.seed, si, stream, idx)
    kind = kinds[idx % len(kinds)]
    if stream == STREAM_ENRICHED:
        x, y = make_quasi_pair(space, rng, kind=kind)
        return "quasi-enriched:" + kind, x, y
    return kind, sample_element(rng, space, kind), sample_element(rng, space, kind)


def _sample_space(config: EnsembleConfig, si: int, space: ModuleSpace) -> dict:
    kinds = config.kinds_for(space)
    counts = dict.fromkeys(ASSIGNMENTS, 0)
    disagreements = dict.fromkeys(PAIRS, 0)
    first_disagreement = {}
    chain, errors = [], []
    n_chain = n_border = n_cert = n_err = 0
    jobs = [(STREAM_RANDOM, i) for i in range(config.samples_per_space)]
    jobs += [(STREAM_ENRICHED, i) for i in range(config.enriched)]
    for stream, idx in jobs:
        where = {"space_index": si, "stream": "random" if stream == STREAM_RANDOM else "enriched",
                 "index": idx, "seed": int(config.seed)}
        try:
            kind, x, y = _draw(config, si, space, stream, idx, kinds)
            verdicts = classify_pair(x, y, config.tolerances)
        except (BJOError, ValueError, ArithmeticError) as exc:
            n_err += 1
            if len(errors) < MAX_EXHIBITS:
                errors.append({**where, "error": f"{type(exc).__name__}: {exc}"})
            continue
        if any(v.answer is Answer.BORDERLINE for v in verdicts.values()):
            n_border += 1
            continue
        n_cert += 1
        key = _key(verdicts)
        counts[key] += 1
        s, q, b = (c == "T" for c in key)
        if (s and not q) or (q and not b):
            n_chain += 1
            if len(chain) < MAX_EXHIBITS:
                chain.append(_exhibit(space, x, y, verdicts, kind=kind, **where))
        for name, (r1, r2) in PAIRS.items():
            if verdicts[r1].holds != verdicts[r2].holds:
                disagreements[name] += 1
                if name not in first_disagreement:
                    first_disagreement[name] = _exhibit(space, x, y, verdicts, kind=kind, **where)
    total = len(jobs)
    return {
        "space": space_to_dict(space),
        "kinds": kinds,
        "samples": total,
        "certified": n_cert,
        "borderline": n_border,
        "borderline_rate": n_border / total,
        "errors": n_err,
        "error_exhibits": errors,
        "counts": counts,
        "chain_violations": n_chain,
        "chain_exhibits": chain,
        "disagreements": disagreements,
        "_first_disagreement": first_disagreement,
    }


def _audit(config, spaces) -> list:
    out = []
    if config.tolerances.inflated:
        out.append({"check": "tolerance", "detail": "tolerances above 1e-4 make unit-scale verdicts meaningless",
                    "tolerances": config.tolerances.as_dict()})
    for s in spaces:
        name = s["space"]["name"]
        if s["chain_violations"]:
            out.append({"check": "chain", "space": name, "count": s["chain_violations"],
                        "exhibit": s["chain_exhibits"][0]})
        if s["borderline_rate"] >= BORDERLINE_LIMIT:
            out.append({"check": "borderline-rate", "space": name, "rate": s["borderline_rate"]})
        if s["errors"]:
            out.append({"check": "sample-errors", "space": name, "count": s["errors"],
                        "exhibit": s["error_exhibits"][0]})
        if s.get("pattern_match") is False:
            out.append({"check": "equivalence-pattern", "space": name,
                        "flags": s["flags"], "predicted": s["predicted"]})
    return out


def run_implication_survey(config: EnsembleConfig) -> SurveyReport:
    """Tally truth assignments per space and record chain violations."""
    spaces = []
    for si, space in enumerate(config.spaces):
        res = _sample_space(config, si, space)
        res.pop("_first_disagreement")
        spaces.append(res)
    return SurveyReport("implication", config.to_dict(), spaces, _audit(config, spaces))


def predicted_flags(space: ModuleSpace) -> dict:
    dims = space.algebra.block_dims
    return {
        "strong~quasi": all(n == 1 for n in dims),
        "quasi~bj": len(dims) == 1,
        "strong~bj": dims == (1,),
    }


def _generator_outcome(build, space, tolerances):
    try:
        ce = build()
    except (CommutativeAlgebra, NotEnoughBlocks) as exc:
        return {"status": "not-applicable", "reason": str(exc)}, None
    a, b = (ce.x_prime, ce.y_prime) if hasattr(ce, "x_prime") else (ce.u_plus, ce.u_minus)
    verdicts = classify_pair(a, b, tolerances)
    out = {"status": "built", "certificates": ce.certificates(),
           "verdicts": {r.value: verdicts[r].answer.value for r in ORDER},
           "problem": ProblemFile(space, a, b).to_dict()}
    return out, verdicts


def run_equivalence_survey(config: EnsembleConfig) -> SurveyReport:
    """Per-space equivalence flags from samples plus the two generators.

    A flag is false as soon as one certified pair separates the relations;
    a generator-built pair is preferred as the exhibit.
    """
    spaces = []
    for si, space in enumerate(config.spaces):
        res = _sample_space(config, si, space)
        sampled = res.pop("_first_disagreement")
        sqc, sqc_v = _generator_outcome(
            lambda: make_sqc_pair(space, rng=spawn_rng(config.seed, si, STREAM_SQC, 0)), space, config.tolerances)
        prime, prime_v = _generator_outcome(
            lambda: make_prime_pair(space, rng=spawn_rng(config.seed, si, STREAM_PRIME, 0)), space, config.tolerances)
        flags, exhibits = {}, {}
        for name, (r1, r2) in PAIRS.items():
            found = None
            for label, outcome, v in (("sqc", sqc, sqc_v), ("prime", prime, prime_v)):
                if v is not None and v[r1].certified and v[r2].certified and v[r1].holds != v[r2].holds:
                    found = {"source": label, **outcome}
                    break
            if found is None and name in sampled:
                found = {"source": "sample", **sampled[name]}
            flags[name] = found is None
            if found is not None:
                exhibits[name] = found
        predicted = predicted_flags(space)
        res.update(flags=flags, predicted=predicted, pattern_match=flags == predicted,
                   exhibits=exhibits, generators={"sqc": sqc, "prime": prime})
        spaces.append(res)
    return SurveyReport("equivalence", config.to_dict(), spaces, _audit(config, spaces))
