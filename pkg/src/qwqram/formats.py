"""Line-oriented text formats for memories, address lists, states and traces.

Memory file::

    # comment
    001	10
    d:6	d:3

Address file (imaginary part optional)::

    001	1
    d:5	0	1

State dump::

    qwqram-state v1 n=3 m=2
    1 3 1 001 10 5.7735026918962573e-01 0.0000000000000000e+00

Trace: a ``qwqram-trace v1`` header, then one ``@step <index> <label>`` line
before each state dump block.
"""

from __future__ import annotations

import json
import math
import re

from .errors import DomainError, FormatError, ShapeError
from .pipeline import TraceRecord
from .state import AddressSuperposition, MemoryTable, NodeIndex, SparseState, TreeShape

STATE_MAGIC = "qwqram-state"
TRACE_MAGIC = "qwqram-trace"
VERSION = "v1"

_STATE_HEADER = re.compile(r"^qwqram-state (\S+) n=(\d+) m=(\d+)$")
_TRACE_HEADER = re.compile(r"^qwqram-trace (\S+) n=(\d+) m=(\d+) steps=(\d+)$")
_STEP_LINE = re.compile(r"^@step (\d+) (\S+)$")
_BINARY = re.compile(r"^[01]+$")
_DECIMAL = re.compile(r"^d:(\d+)$")


def format_real(x: float) -> str:
    # 17 significant digits round-trip every double
    return f"{x:.16e}"


def format_word(value: int, width: int) -> str:
    return format(value, f"0{width}b")


def parse_word(token: str, width: int, what: str, line: int | None = None) -> int:
    """Decode an ``width``-char binary string (MSB first) or ``d:<decimal>``."""
    match = _DECIMAL.match(token)
    if match:
        value = int(match.group(1))
    elif _BINARY.match(token):
        if len(token) != width:
            raise ShapeError(
                f"{what} {token!r} has {len(token)} bits, expected {width}"
                + (f" (line {line})" if line is not None else "")
            )
        value = int(token, 2)
    else:
        raise FormatError(f"malformed {what} {token!r}", line)
    if value >= 1 << width:
        raise ShapeError(
            f"{what} {value} out of range for {width} bits" + (f" (line {line})" if line is not None else "")
        )
    return value


def _parse_real(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"malformed real {token!r}", line) from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite real {token!r}", line)
    return value


def _content_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield number, [field.strip() for field in body.split("\t")]


def parse_memory(text: str, shape: TreeShape) -> MemoryTable:
    cells: dict[int, int] = {}
    for line, fields in _content_lines(text):
        if len(fields) != 2:
            raise FormatError(f"expected ADDRESS<TAB>DATA, got {len(fields)} fields", line)
        a = parse_word(fields[0], shape.n, "address", line)
        x = parse_word(fields[1], shape.m, "data word", line)
        if a in cells:
            raise FormatError(f"duplicate address {fields[0]}", line)
        cells[a] = x
    return MemoryTable(shape, cells)


def serialize_memory(mem: MemoryTable) -> str:
    n, m = mem.shape.n, mem.shape.m
    return "".join(
        f"{format_word(a, n)}\t{format_word(x, m)}\n" for a, x in mem.nonzero_cells().items()
    )


def parse_addresses(text: str, shape: TreeShape, normalize: bool = True) -> AddressSuperposition:
    terms = []
    for line, fields in _content_lines(text):
        if len(fields) not in (2, 3):
            raise FormatError(f"expected ADDRESS<TAB>RE[<TAB>IM], got {len(fields)} fields", line)
        a = parse_word(fields[0], shape.n, "address", line)
        re_part = _parse_real(fields[1], line)
        im_part = _parse_real(fields[2], line) if len(fields) == 3 else 0.0
        terms.append((a, complex(re_part, im_part)))
    if not terms:
        raise FormatError("address file has no entries")
    try:
        return AddressSuperposition(terms, normalize=normalize)
    except DomainError as exc:
        raise FormatError(str(exc)) from None


def serialize_addresses(addrs: AddressSuperposition, shape: TreeShape) -> str:
    return "".join(
        f"{format_word(a, shape.n)}\t{format_real(amp.real)}\t{format_real(amp.imag)}\n"
        for a, amp in addrs.validate(shape).terms
    )


def _state_lines(state: SparseState) -> list[str]:
    n, m = state.shape.n, state.shape.m
    lines = [f"{STATE_MAGIC} {VERSION} n={n} m={m}"]
    s = state.canonical()
    for l, w, c, a, d, amp in zip(
        s.level.tolist(), s.pos.tolist(), s.chir.tolist(), s.addr.tolist(), s.data.tolist(), s.amp.tolist()
    ):
        lines.append(
            f"{w} {l} {c} {format_word(a, n)} {format_word(d, m)} "
            f"{format_real(amp.real)} {format_real(amp.imag)}"
        )
    return lines


def serialize_state(state: SparseState) -> str:
    return "\n".join(_state_lines(state)) + "\n"


def _parse_state_lines(lines: list[tuple[int, str]]) -> SparseState:
    if not lines:
        raise FormatError("missing state header")
    number, header = lines[0]
    match = _STATE_HEADER.match(header)
    if not match:
        raise FormatError(f"bad state header {header!r}", number)
    if match.group(1) != VERSION:
        raise FormatError(f"unsupported state version {match.group(1)!r}", number)
    try:
        shape = TreeShape(int(match.group(2)), int(match.group(3)))
    except DomainError as exc:
        raise FormatError(str(exc), number) from None
    seen = set()
    cols: list[list] = [[], [], [], [], [], []]
    for number, body in lines[1:]:
        fields = body.split()
        if len(fields) != 7:
            raise FormatError(f"expected 7 fields, got {len(fields)}", number)
        try:
            w, l, c = (int(x) for x in fields[:3])
        except ValueError:
            raise FormatError("node and chirality must be integers", number) from None
        if c not in (0, 1):
            raise FormatError(f"chirality must be 0 or 1, got {c}", number)
        try:
            NodeIndex(l, w).validate(shape)
        except ShapeError as exc:
            raise FormatError(str(exc), number) from None
        a = parse_word(fields[3], shape.n, "address", number)
        d = parse_word(fields[4], shape.m, "data word", number)
        if (l, w, c, a, d) in seen:
            raise FormatError("duplicate basis label", number)
        seen.add((l, w, c, a, d))
        amp = complex(_parse_real(fields[5], number), _parse_real(fields[6], number))
        for col, value in zip(cols, (l, w, c, a, d, amp)):
            col.append(value)
    return SparseState(shape, *cols)


def _numbered(text: str) -> list[tuple[int, str]]:
    return [(i, line.strip()) for i, line in enumerate(text.splitlines(), start=1) if line.strip()]


def parse_state(text: str) -> SparseState:
    return _parse_state_lines(_numbered(text))


def serialize_trace(trace: TraceRecord) -> str:
    shape = trace.shape
    out = [f"{TRACE_MAGIC} {VERSION} n={shape.n} m={shape.m} steps={len(trace)}"]
    for index, (label, state) in enumerate(trace.steps):
        out.append(f"@step {index} {label}")
        out.extend(_state_lines(state))
    return "\n".join(out) + "\n"


def split_trace_blocks(text: str) -> list[tuple[str, str]]:
    """``(label, state dump text)`` for each block of a trace document."""
    return [(label, "\n".join(line for _, line in block) + "\n") for label, block in _trace_blocks(text)]


def _trace_blocks(text: str):
    lines = _numbered(text)
    if not lines:
        raise FormatError("empty trace")
    number, header = lines[0]
    match = _TRACE_HEADER.match(header)
    if not match:
        raise FormatError(f"bad trace header {header!r}", number)
    if match.group(1) != VERSION:
        raise FormatError(f"unsupported trace version {match.group(1)!r}", number)
    expected = int(match.group(4))
    blocks: list[tuple[str, list]] = []
    for number, line in lines[1:]:
        step = _STEP_LINE.match(line)
        if step:
            if int(step.group(1)) != len(blocks):
                raise FormatError(f"step index {step.group(1)} out of sequence", number)
            blocks.append((step.group(2), []))
        elif not blocks:
            raise FormatError("state line before first @step", number)
        else:
            blocks[-1][1].append((number, line))
    if len(blocks) != expected:
        raise FormatError(f"trace header announces {expected} steps, found {len(blocks)}")
    return blocks


def parse_trace(text: str) -> TraceRecord:
    lines = _numbered(text)
    header = _TRACE_HEADER.match(lines[0][1]) if lines else None
    blocks = _trace_blocks(text)
    shape = TreeShape(int(header.group(2)), int(header.group(3)))
    trace = TraceRecord(shape)
    for label, block in blocks:
        state = _parse_state_lines(block)
        if state.shape != shape:
            raise FormatError(f"step {label} has shape {state.shape}, trace has {shape}", block[0][0])
        trace.record(label, state)
    return trace


def state_to_json(state: SparseState) -> dict:
    n, m = state.shape.n, state.shape.m
    return {
        "n": n,
        "m": m,
        "entries": [
            {
                "w": basis.node.w,
                "l": basis.node.l,
                "c": basis.c,
                "address": format_word(basis.a, n),
                "data": format_word(basis.d, m),
                "re": amp.real,
                "im": amp.imag,
            }
            for basis, amp in state
        ],
    }


def trace_to_json(trace: TraceRecord) -> str:
    doc = {
        "format": TRACE_MAGIC,
        "version": VERSION,
        "n": trace.shape.n,
        "m": trace.shape.m,
        "steps": [{"label": label, "state": state_to_json(state)} for label, state in trace.steps],
    }
    return json.dumps(doc, indent=2) + "\n"


def state_json(state: SparseState) -> str:
    doc = {"format": STATE_MAGIC, "version": VERSION, **state_to_json(state)}
    return json.dumps(doc, indent=2) + "\n"
