"""Job specifications, the input grammar and command dispatch.

A job is one line::

    command <positional or NAME=value tokens> [--window n] [--truncation n] ...

Tokens are separated by whitespace outside parentheses and brackets, so
``K1B=InfSum(3; n)`` is a single token.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expr import ParseError, as_fg, canonicalize, invariants, parse_expr
from .fg import FgGroup, ext_group, hom_group
from .tower import (DEFAULT_WINDOW, DirectTower, ProDescriptor, Verdict, apply_ext, apply_hom,
                    ext_of_colimit, jensen_kernel_profile, lim1, lim_group, parse_tower, pext,
                    zadic_closure_check)
from .uct import (KTheoryData, fine_structure, jensen_obstruction, kk_filtration_diagram,
                  kk_group, kl_group, lim1_gamma_check, milnor_obstruction, topology_report)

SCHEMA = 1
COMMANDS = ("fg-hom", "fg-ext", "tower-analyze", "pext", "uct-report", "diagram-check",
            "catalog-run")
CATALOG_NAMES = ("remark24", "remark46", "example53", "thm52-suite", "finite-models")
K_FIELDS = ("K0A", "K1A", "K0B", "K1B")


def tokenize(text: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens at bracket depth 0, with their columns."""
    out, depth, cur, start = [], 0, [], None
    for col, ch in enumerate(text):
        if ch.isspace() and depth == 0:
            if cur:
                out.append(("".join(cur), start))
                cur = []
            continue
        if not cur:
            start = col
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced closing bracket", text, col)
        cur.append(ch)
    if depth:
        raise ParseError("unbalanced opening bracket", text, len(text))
    if cur:
        out.append(("".join(cur), start))
    return out


@dataclass(frozen=True)
class JobSpec:
    command: str
    inputs: tuple = ()            # (name, parsed value) pairs, in grammar order
    window: int = DEFAULT_WINDOW
    truncation: int | None = None
    strict: bool = False
    summary: bool = False
    out: str | None = None

    def get(self, name: str):
        return dict(self.inputs).get(name)

    def to_text(self) -> str:
        parts = [self.command]
        for name, value in self.inputs:
            text = value.to_text() if isinstance(value, (DirectTower, KTheoryData)) else str(value)
            if name.startswith("--"):
                parts += [name, text]
            elif name.startswith("arg"):
                parts.append(text)
            elif name == "data":
                parts.append(text)
            else:
                parts.append(f"{name}={text}")
        if self.window != DEFAULT_WINDOW:
            parts += ["--window", str(self.window)]
        if self.truncation is not None:
            parts += ["--truncation", str(self.truncation)]
        if self.strict:
            parts.append("--strict")
        if self.summary:
            parts.append("--summary")
        if self.out:
            parts += ["--out", self.out]
        return " ".join(parts)


_VALUE_FLAGS = {"--window", "--truncation", "--out", "--tower", "--target", "--degree"}
_BOOL_FLAGS = {"--strict", "--summary"}


def _fg_arg(text: str) -> FgGroup:
    g = as_fg(parse_expr(text))
    if g is None:
        raise ParseError("expected a finitely generated group", text, 0)
    return g


def _int_flag(value: str, flag: str, col: int, line: str, low: int = 1) -> int:
    try:
        n = int(value)
    except ValueError:
        raise ParseError(f"{flag} needs an integer", line, col) from None
    if n < low:
        raise ParseError(f"{flag} must be at least {low}", line, col)
    return n


def parse_input(line: str) -> JobSpec:
    """Parse one job line; errors carry the column of the offending token."""
    toks = tokenize(line)
    if not toks:
        raise ParseError("empty job", line, 0)
    command, _ = toks[0]
    if command not in COMMANDS:
        raise ParseError(f"unknown command {command!r}", line, 0)
    flags: dict[str, tuple[str, int]] = {}
    bools: set[str] = set()
    rest: list[tuple[str, int]] = []
    i = 1
    while i < len(toks):
        tok, col = toks[i]
        if tok in _VALUE_FLAGS:
            if i + 1 >= len(toks):
                raise ParseError(f"{tok} needs a value", line, col)
            flags[tok] = toks[i + 1]
            i += 2
            continue
        if tok in _BOOL_FLAGS:
            bools.add(tok)
        elif tok.startswith("--"):
            raise ParseError(f"unknown flag {tok}", line, col)
        else:
            rest.append((tok, col))
        i += 1

    try:
        inputs = _parse_inputs(command, rest, flags, line)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc), line, rest[0][1] if rest else 0) from None
    window = _int_flag(*flags["--window"], "--window", line) if "--window" in flags \
        else DEFAULT_WINDOW
    trunc = None
    if "--truncation" in flags:
        trunc = _int_flag(flags["--truncation"][0], "--truncation", flags["--truncation"][1],
                          line)
        if trunc < window:
            raise ParseError("--truncation must be at least --window", line,
                             flags["--truncation"][1])
    out = flags["--out"][0] if "--out" in flags else None
    return JobSpec(command, inputs, window, trunc, "--strict" in bools, "--summary" in bools, out)


def _parse_with_col(fn, text: str, col: int, line: str):
    try:
        return fn(text)
    except ParseError as exc:
        raise ParseError(exc.msg, line, col + exc.column - 1) from None


def _parse_inputs(command: str, rest, flags, line: str) -> tuple:
    def need(n):
        if len(rest) != n:
            raise ParseError(f"{command} takes {n} positional argument(s), got {len(rest)}",
                             line, rest[n][1] if len(rest) > n else len(line))

    if command in ("fg-hom", "fg-ext"):
        need(2)
        return tuple((f"arg{k}", _parse_with_col(_fg_arg, t, c, line))
                     for k, (t, c) in enumerate(rest))
    if command == "catalog-run":
        need(1)
        name = rest[0][0]
        if name not in CATALOG_NAMES:
            raise ParseError(f"unknown catalog {name!r}", line, rest[0][1])
        return (("arg0", name),)
    if command in ("tower-analyze", "pext"):
        need(0)
        if "--tower" not in flags:
            raise ParseError(f"{command} needs --tower", line, len(line))
        t, c = flags["--tower"]
        out = [("--tower", _parse_with_col(parse_tower, t, c, line))]
        if "--target" in flags:
            t, c = flags["--target"]
            out.append(("--target", canonicalize(_parse_with_col(parse_expr, t, c, line))))
        elif command == "pext":
            raise ParseError("pext needs --target", line, len(line))
        return tuple(out)
    # uct-report and diagram-check: four named K-theory fields
    fields = {}
    for tok, col in rest:
        if "=" not in tok:
            raise ParseError("expected NAME=value", line, col)
        key, value = tok.split("=", 1)
        if key not in K_FIELDS:
            raise ParseError(f"unknown field {key!r}; expected one of {', '.join(K_FIELDS)}",
                             line, col)
        if key in fields:
            raise ParseError(f"field {key} given twice", line, col)
        fields[key] = (value, col + len(key) + 1)
    for key in K_FIELDS:
        if key not in fields:
            raise ParseError(f"missing field {key}", line, len(line))
    from .uct import parse_k_tower
    kA = tuple(_parse_with_col(parse_k_tower, *fields[k], line) for k in ("K0A", "K1A"))
    kB = tuple(_parse_with_col(parse_expr, *fields[k], line) for k in ("K0B", "K1B"))
    out = [("data", KTheoryData(kA, kB))]
    if "--degree" in flags:
        d, c = flags["--degree"]
        if d not in ("0", "1"):
            raise ParseError("--degree must be 0 or 1", line, c)
        out.append(("--degree", int(d)))
    return tuple(out)


# --------------------------------------------------------------------------
# dispatch


def _group_json(g: FgGroup) -> dict:
    return {"value": str(g), "order": g.order if g.is_finite else "infinite",
            "profile": invariants(parse_expr(str(g))).to_json()}


def _value_json(v) -> dict:
    if isinstance(v, ProDescriptor):
        return {"value": str(v), "opaque": True}
    v = canonicalize(v)
    return {"value": str(v), "profile": invariants(v).to_json()}


def _functor_json(t: DirectTower, h, functor: str, job: JobSpec) -> dict:
    ft = apply_hom(t, h) if functor == "hom" else apply_ext(t, h)
    res = lim1(ft, job.window, job.truncation)
    lim = lim_group(ft, job.window)
    return {"stages": [str(ft.stage(i)) for i in range(1, 5)],
            "lim1": res.to_json(), "lim": lim.to_json()}


def run_fg(job: JobSpec) -> dict:
    g, h = job.get("arg0"), job.get("arg1")
    if job.command == "fg-hom":
        res = hom_group(g, h).group
    else:
        res = ext_group(g, h)
    return {"source": str(g), "target": str(h), "functor": job.command[3:],
            "result": _group_json(res)}


def run_tower(job: JobSpec) -> dict:
    t, h = job.get("--tower"), job.get("--target")
    out = {"tower": t.to_text(), "colimit": _value_json(t.colimit()),
           "stages": [str(t.stage(i)) for i in range(1, 5)]}
    if h is not None:
        out["target"] = str(h)
        out["hom_tower"] = _functor_json(t, h, "hom", job)
        out["ext_tower"] = _functor_json(t, h, "ext", job)
    return out


def run_pext(job: JobSpec) -> dict:
    t, h = job.get("--tower"), job.get("--target")
    pr = pext(t, h, job.window, job.truncation)
    out = {"tower": t.to_text(), "target": str(h), "colimit": str(t.colimit()),
           "pext": pr.to_json()}
    ext_value = ext_of_colimit(t.colimit(), h)
    if ext_value is not None:
        out["ext"] = _value_json(ext_value)
        if not isinstance(ext_value, ProDescriptor):
            exp = invariants(ext_value).exponent
            out["zadic"] = {"discrete": True if isinstance(exp, int) else
                            (False if exp == "infinite" else None),
                            **zadic_closure_check(ext_value, pr.verdict).to_json()}
    out["jensen"] = jensen_kernel_profile(t, h, job.window, pr)
    out["lim_ext"] = lim_group(apply_ext(t, h), job.window).to_json()
    return out


def _degrees(job: JobSpec) -> tuple[int, ...]:
    d = job.get("--degree")
    return (0, 1) if d is None else (d,)


def run_uct(job: JobSpec) -> dict:
    data: KTheoryData = job.get("data")
    w, tr = job.window, job.truncation
    degrees = {}
    for n in _degrees(job):
        degrees[str(n)] = {
            "kk": kk_group(data, n, w, tr).to_json(),
            "fine_structure": fine_structure(data, n, w, tr).to_json(),
            "kl": kl_group(data, n, w).to_json(),
            "obstructions": {"m": milnor_obstruction(data, n, w, tr).to_json(),
                             "j": jensen_obstruction(data, n, w, tr).to_json()},
            "topology": topology_report(data, n, w, tr),
        }
    return {"data": data.to_text(), "degrees": degrees,
            "lim1_gamma": lim1_gamma_check(data, w, tr)}


def run_diagram(job: JobSpec) -> dict:
    data: KTheoryData = job.get("data")
    return {"data": data.to_text(),
            "degrees": {str(n): kk_filtration_diagram(data, n, job.window,
                                                      job.truncation).to_json()
                        for n in _degrees(job)}}


def execute(job: JobSpec) -> dict:
    """Run a job and wrap the result in the versioned report envelope."""
    if job.command == "catalog-run":
        from .catalog import run_catalog
        result = run_catalog(job.get("arg0"), job.window)
    else:
        handler = {"fg-hom": run_fg, "fg-ext": run_fg, "tower-analyze": run_tower,
                   "pext": run_pext, "uct-report": run_uct, "diagram-check": run_diagram}
        result = handler[job.command](job)
    return {"schema": SCHEMA, "command": job.command, "input": job.to_text(),
            "window": job.window, "result": result}


def has_inconclusive(obj) -> bool:
    if isinstance(obj, dict):
        return any(has_inconclusive(v) for v in obj.values())
    if isinstance(obj, list):
        return any(has_inconclusive(v) for v in obj)
    return obj in (Verdict.INCONCLUSIVE.value, "InconclusiveWindow")


@dataclass
class Job:
    """A job line together with its position in a jobs file."""
    spec: JobSpec
    line_no: int = 0
    notes: list = field(default_factory=list)


def parse_jobs(text: str) -> list[Job]:
    jobs = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            jobs.append(Job(parse_input(line), no))
    return jobs
