"""Parser for the plain-text, key-delimited record files used for shipped data
(prompt catalog, harm rubric, scenario fixtures).

Format, line by line:
    # comment            ignored outside block values
    key: value           metadata (value stripped)
    key> value           payload string, byte-exact after "> "
    key<<                starts a multi-line block; lines up to a line equal
                         to ">>" form the value, joined with "\n"
    record: <type>       starts a new record

Lines before the first record are file-level metadata.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class RecordFile:
    meta: dict[str, str] = field(default_factory=dict)
    records: list[dict[str, str]] = field(default_factory=list)


class RecordFormatError(ValueError):
    pass


def parse_records(text: str, source: str = "<string>") -> RecordFile:
    out = RecordFile()
    current: dict[str, str] | None = None
    block_key: str | None = None
    block_lines: list[str] = []

    def target() -> dict[str, str]:
        return out.meta if current is None else current

    for lineno, line in enumerate(text.split("\n"), start=1):
        if block_key is not None:
            if line == ">>":
                target()[block_key] = "\n".join(block_lines)
                block_key = None
                block_lines = []
            else:
                block_lines.append(line)
            continue
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("record:"):
            current = {"record": line.split(":", 1)[1].strip()}
            out.records.append(current)
        elif line.endswith("<<") and line[:-2].isidentifier():
            block_key = line[:-2]
        elif "> " in line and line.split("> ", 1)[0].isidentifier():
            key, value = line.split("> ", 1)
            target()[key] = value
        elif ":" in line:
            key, value = line.split(":", 1)
            target()[key.strip()] = value.strip()
        else:
            raise RecordFormatError(f"{source}:{lineno}: unparseable line {line!r}")

    if block_key is not None:
        raise RecordFormatError(f"{source}: unterminated block {block_key!r}")
    return out


def parse_records_file(path: str | Path) -> RecordFile:
    p = Path(path)
    return parse_records(p.read_text(encoding="utf-8"), source=str(p))
