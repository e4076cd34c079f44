"""Plain-text instance files.

::

    # Example
    [workers]
    w1 w2
    [firms]
    f1
    f2 2
    [worker_prefs]
    w1: f1 f2
    [firm_prefs]
    f1: w2 w1
    [constraints]
    w_out f1: w2

A firm without a quota has quota 1. ``[constraints]`` is optional and takes
``f_in``/``f_out`` lines keyed by worker and ``w_in``/``w_out`` lines keyed by
firm.
"""
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple
import logging

from app.core.exceptions import InstanceFormatError
from app.models.schemas import AssignmentConstraints, Firm, Instance, InstanceCreate
from app.services.market_service import validate_constraints, validate_instance

logger = logging.getLogger(__name__)

REQUIRED_SECTIONS = ("workers", "firms", "worker_prefs", "firm_prefs")
SECTIONS = REQUIRED_SECTIONS + ("constraints",)
CONSTRAINT_KEYS = ("f_in", "f_out", "w_in", "w_out")


def _split_keyed(body: str) -> Optional[Tuple[str, List[str]]]:
    if ":" not in body:
        return None
    name, _, rest = body.partition(":")
    name = name.strip()
    if not name or len(name.split()) != 1:
        return None
    return name, rest.split()


def parse_instance(text: str) -> Tuple[Instance, AssignmentConstraints]:
    """Parse and validate an instance file, collecting every syntax error."""
    errors: List[Tuple[int, str]] = []
    seen_sections: Set[str] = set()
    section: Optional[str] = None

    workers: List[str] = []
    firms: List[Firm] = []
    worker_prefs: Dict[str, List[str]] = {}
    firm_prefs: Dict[str, List[str]] = {}
    constraints: Dict[str, Dict[str, Set[str]]] = {key: {} for key in CONSTRAINT_KEYS}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in SECTIONS:
                errors.append((lineno, f"unknown section [{name}]"))
                section = None
            elif name in seen_sections:
                errors.append((lineno, f"section [{name}] appears more than once"))
                section = None
            else:
                seen_sections.add(name)
                section = name
            continue
        if section is None:
            errors.append((lineno, "line is outside any known section"))
            continue

        if section == "workers":
            workers.extend(line.split())
        elif section == "firms":
            tokens = line.split()
            if len(tokens) > 2:
                errors.append((lineno, "expected a firm name and an optional quota"))
                continue
            quota = 1
            if len(tokens) == 2:
                try:
                    quota = int(tokens[1])
                except ValueError:
                    errors.append((lineno, f"quota {tokens[1]!r} is not an integer"))
                    continue
            firms.append(Firm(name=tokens[0], quota=quota))
        elif section in ("worker_prefs", "firm_prefs"):
            parsed = _split_keyed(line)
            if parsed is None:
                errors.append((lineno, "expected 'name: first second ...'"))
                continue
            name, entries = parsed
            table = worker_prefs if section == "worker_prefs" else firm_prefs
            if name in table:
                errors.append((lineno, f"second preference list for {name}"))
                continue
            table[name] = entries
        else:
            key, _, body = line.partition(" ")
            if key not in CONSTRAINT_KEYS:
                errors.append((lineno, f"unknown constraint key {key!r}"))
                continue
            parsed = _split_keyed(body)
            if parsed is None:
                errors.append((lineno, f"expected '{key} name: member ...'"))
                continue
            name, members = parsed
            constraints[key].setdefault(name, set()).update(members)

    for name in REQUIRED_SECTIONS:
        if name not in seen_sections:
            errors.append((0, f"missing section [{name}]"))
    if errors:
        raise InstanceFormatError(errors)

    instance = validate_instance(InstanceCreate(
        workers=tuple(workers),
        firms=tuple(firms),
        worker_prefs=worker_prefs,
        firm_prefs=firm_prefs,
    ))
    ac = AssignmentConstraints(**{
        key: {name: frozenset(members) for name, members in table.items()}
        for key, table in constraints.items()
    })
    validate_constraints(instance, ac)
    logger.debug(f"Parsed instance with {instance.m} workers, {instance.n} firms")
    return instance, ac


def serialize_instance(inst: Instance, ac: Optional[AssignmentConstraints] = None) -> str:
    lines = ["[workers]", " ".join(inst.workers), "[firms]"]
    lines.extend(f"{f.name} {f.quota}" if f.quota != 1 else f.name for f in inst.firms)
    lines.append("[worker_prefs]")
    lines.extend(f"{w}: {' '.join(inst.worker_prefs[w])}" for w in inst.workers)
    lines.append("[firm_prefs]")
    lines.extend(f"{f}: {' '.join(inst.firm_prefs[f])}" for f in inst.firm_names)
    if ac is not None and not ac.is_empty():
        lines.append("[constraints]")
        for key in CONSTRAINT_KEYS:
            for name, members in sorted(getattr(ac, key).items()):
                if members:
                    lines.append(f"{key} {name}: {' '.join(sorted(members))}")
    return "\n".join(lines) + "\n"


def load_instance(path: str) -> Tuple[Instance, AssignmentConstraints]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceFormatError([(0, f"cannot read {path}: {e.strerror or e}")])
    return parse_instance(text)
